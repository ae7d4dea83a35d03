use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fg::FactorGraph;
use crate::width::decomposition::HierarchyDecomposition;
use crate::width::factorset::{FactorSet, Incidence};

/// Guards for the exponential exact computations.
#[derive(Debug, Clone, Copy)]
pub struct WidthLimits {
    /// Largest factor count accepted by the exact recursion.
    pub max_factors: usize,
    /// Largest number of memoized subsets before giving up.
    pub max_memo_entries: usize,
}

impl Default for WidthLimits {
    fn default() -> Self {
        WidthLimits {
            max_factors: 32,
            max_memo_entries: 4_000_000,
        }
    }
}

/// Exact hierarchy width with the default limits.
pub fn hierarchy_width(graph: &FactorGraph) -> Result<usize> {
    hierarchy_width_with_limits(graph, WidthLimits::default())
}

pub fn hierarchy_width_with_limits(graph: &FactorGraph, limits: WidthLimits) -> Result<usize> {
    let mut solver = ExactSolver::new(graph, limits)?;
    let all = FactorSet::full(graph.num_factors());
    solver.width(&all)
}

/// A certificate whose width equals the hierarchy width.
pub fn hierarchy_decomposition(graph: &FactorGraph) -> Result<HierarchyDecomposition> {
    hierarchy_decomposition_with_limits(graph, WidthLimits::default())
}

pub fn hierarchy_decomposition_with_limits(
    graph: &FactorGraph,
    limits: WidthLimits,
) -> Result<HierarchyDecomposition> {
    let mut solver = ExactSolver::new(graph, limits)?;
    let all = FactorSet::full(graph.num_factors());
    let mut decomp = HierarchyDecomposition::with_root(Vec::new());
    solver.build(&all, &mut decomp, None)?;
    Ok(decomp)
}

/// Minimum over single-factor removals for connected sets, maximum over
/// components otherwise, zero for the empty set.
struct ExactSolver {
    inc: Incidence,
    memo: HashMap<FactorSet, usize>,
    limits: WidthLimits,
}

impl ExactSolver {
    fn new(graph: &FactorGraph, limits: WidthLimits) -> Result<Self> {
        if graph.num_factors() > limits.max_factors {
            return Err(Error::limit(format!(
                "exact hierarchy width supports at most {} factors, graph has {}; use hw_at_most_k",
                limits.max_factors,
                graph.num_factors()
            )));
        }
        Ok(ExactSolver {
            inc: Incidence::new(graph),
            memo: HashMap::new(),
            limits,
        })
    }

    fn width(&mut self, set: &FactorSet) -> Result<usize> {
        if set.is_empty() {
            return Ok(0);
        }
        let comps = self.inc.components(set);
        let mut best = 0;
        for c in &comps {
            best = best.max(self.connected_width(c)?);
        }
        Ok(best)
    }

    fn connected_width(&mut self, set: &FactorSet) -> Result<usize> {
        let size = set.len();
        if size == 1 {
            return Ok(1);
        }
        if let Some(&w) = self.memo.get(set) {
            return Ok(w);
        }
        let lower = self.inc.max_degree(set).max(1);
        let mut best = size;
        for f in self.inc.removal_candidates(set) {
            if best <= lower {
                break;
            }
            let rest = set.without(f);
            if 1 + self.inc.max_degree(&rest) >= best {
                continue;
            }
            best = best.min(1 + self.width(&rest)?);
        }
        if self.memo.len() >= self.limits.max_memo_entries {
            return Err(Error::limit("hierarchy width memo table is full"));
        }
        self.memo.insert(set.clone(), best);
        Ok(best)
    }

    /// Appends the decomposition of `set` below `parent` (or into the root).
    /// Every factor removed on the way down is added to the whole subtree.
    fn build(
        &mut self,
        set: &FactorSet,
        decomp: &mut HierarchyDecomposition,
        parent: Option<usize>,
    ) -> Result<usize> {
        let comps = self.inc.components(set);
        if comps.len() == 1 {
            return self.build_connected(&comps[0], decomp, parent);
        }
        // Empty-labelled node over the components (also the factorless case).
        let node = match parent {
            None => 0,
            Some(p) => decomp.add_child(p, Vec::new()),
        };
        for c in &comps {
            self.build_connected(c, decomp, Some(node))?;
        }
        Ok(node)
    }

    fn build_connected(
        &mut self,
        set: &FactorSet,
        decomp: &mut HierarchyDecomposition,
        parent: Option<usize>,
    ) -> Result<usize> {
        let target = self.connected_width(set)?;
        let mut chosen = None;
        for f in set.iter() {
            if 1 + self.width(&set.without(f))? == target {
                chosen = Some(f);
                break;
            }
        }
        let removed = chosen.expect("some removal attains the minimum");
        let rest = set.without(removed);
        let subtree = if rest.is_empty() {
            match parent {
                None => 0,
                Some(p) => decomp.add_child(p, Vec::new()),
            }
        } else {
            self.build(&rest, decomp, parent)?
        };
        decomp.add_to_subtree(subtree, removed);
        Ok(subtree)
    }
}

/// Decides `hw(G) <= k` by removing one factor from a connected component
/// and recursing with `k - 1`, component by component.
pub fn hw_at_most_k(graph: &FactorGraph, k: usize) -> bool {
    let mut decider = Decider {
        inc: Incidence::new(graph),
        memo: HashMap::new(),
    };
    let all = FactorSet::full(graph.num_factors());
    decider.at_most(&all, k)
}

/// Smallest `k` with `hw_at_most_k(graph, k)`, by binary search between the
/// degree lower bound and the factor count.
pub fn hierarchy_width_by_search(graph: &FactorGraph) -> usize {
    let mut decider = Decider {
        inc: Incidence::new(graph),
        memo: HashMap::new(),
    };
    let all = FactorSet::full(graph.num_factors());
    let mut lo = decider.inc.max_degree(&all);
    let mut hi = graph.num_factors();
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if decider.at_most(&all, mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

struct Decider {
    inc: Incidence,
    /// Per connected subset: (smallest k known feasible, largest k known infeasible).
    memo: HashMap<FactorSet, (usize, Option<usize>)>,
}

impl Decider {
    fn at_most(&mut self, set: &FactorSet, k: usize) -> bool {
        if set.is_empty() {
            return true;
        }
        if k == 0 {
            return false;
        }
        self.inc
            .components(set)
            .iter()
            .all(|c| self.component_at_most(c, k))
    }

    fn component_at_most(&mut self, comp: &FactorSet, k: usize) -> bool {
        let size = comp.len();
        if size <= k {
            return true;
        }
        if self.inc.max_degree(comp) > k {
            return false;
        }
        if let Some(&(yes, no)) = self.memo.get(comp) {
            if k >= yes {
                return true;
            }
            if no.is_some_and(|n| k <= n) {
                return false;
            }
        }
        let mut feasible = false;
        for e in self.inc.removal_candidates(comp) {
            if self.at_most(&comp.without(e), k - 1) {
                feasible = true;
                break;
            }
        }
        let entry = self.memo.entry(comp.clone()).or_insert((size, None));
        if feasible {
            entry.0 = entry.0.min(k);
        } else {
            entry.1 = Some(entry.1.map_or(k, |n| n.max(k)));
        }
        feasible
    }
}
