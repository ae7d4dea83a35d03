use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fg::FactorGraph;

/// Largest line graph accepted by [`tree_depth_of_line_graph`].
pub const TREE_DEPTH_MAX_VERTICES: usize = 24;

/// The line graph: one vertex per factor, adjacent when scopes intersect.
pub fn line_graph(graph: &FactorGraph) -> Vec<Vec<usize>> {
    let m = graph.num_factors();
    let mut adj = vec![Vec::new(); m];
    for a in 0..m {
        for b in a + 1..m {
            let sa = graph.factor(a).scope();
            if graph.factor(b).scope().iter().any(|v| sa.contains(v)) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    adj
}

/// Exact tree-depth of the line graph by recursive vertex deletion.
pub fn tree_depth_of_line_graph(graph: &FactorGraph) -> Result<usize> {
    let adj = line_graph(graph);
    if adj.len() > TREE_DEPTH_MAX_VERTICES {
        return Err(Error::limit(format!(
            "tree-depth supports at most {TREE_DEPTH_MAX_VERTICES} vertices, line graph has {}",
            adj.len()
        )));
    }
    let mut td = TreeDepth {
        adj,
        memo: HashMap::new(),
    };
    let all: Vec<usize> = (0..td.adj.len()).collect();
    Ok(td.depth(&all))
}

struct TreeDepth {
    adj: Vec<Vec<usize>>,
    memo: HashMap<Vec<usize>, usize>,
}

impl TreeDepth {
    /// `vertices` is sorted.
    fn depth(&mut self, vertices: &[usize]) -> usize {
        if vertices.is_empty() {
            return 0;
        }
        self.components(vertices)
            .iter()
            .map(|c| self.connected_depth(c))
            .max()
            .unwrap_or(0)
    }

    fn connected_depth(&mut self, vertices: &[usize]) -> usize {
        if vertices.len() == 1 {
            return 1;
        }
        if let Some(&d) = self.memo.get(vertices) {
            return d;
        }
        let mut best = usize::MAX;
        for &v in vertices {
            let rest: Vec<usize> = vertices.iter().copied().filter(|&u| u != v).collect();
            best = best.min(1 + self.depth(&rest));
        }
        self.memo.insert(vertices.to_vec(), best);
        best
    }

    fn components(&self, vertices: &[usize]) -> Vec<Vec<usize>> {
        let mut seen: Vec<bool> = vec![false; self.adj.len()];
        let inside = |u: usize| vertices.binary_search(&u).is_ok();
        let mut out = Vec::new();
        for &s in vertices {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                for &w in &self.adj[u] {
                    if !seen[w] && inside(w) {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}
