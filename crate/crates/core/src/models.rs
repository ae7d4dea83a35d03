//! Builders for the voting model, path graphs and tree-shaped Ising models.

use rand::Rng;

use crate::fg::{AggregateFactor, Factor, FactorGraph, Semantics, TableFactor, Variable};
use crate::rng;
use crate::width::{hierarchy_width_by_search, structural_bounds};

/// Prior weights for the voter variables.
#[derive(Debug, Clone, PartialEq)]
pub enum VotingPriors {
    Zero,
    /// `w_{T_i}, w_{F_i}` drawn uniformly from `(-1, 0)`.
    Uniform { seed: u64 },
    Explicit { t: Vec<f64>, f: Vec<f64> },
}

impl VotingPriors {
    fn weights(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        match self {
            VotingPriors::Zero => (vec![0.0; n], vec![0.0; n]),
            VotingPriors::Uniform { seed } => {
                let mut r = rng::stream(*seed, 0);
                let t = (0..n).map(|_| r.random_range(-1.0..0.0)).collect();
                let f = (0..n).map(|_| r.random_range(-1.0..0.0)).collect();
                (t, f)
            }
            VotingPriors::Explicit { t, f } => {
                assert_eq!((t.len(), f.len()), (n, n), "one prior per voter");
                (t.clone(), f.clone())
            }
        }
    }
}

/// The voting model: `Q ∈ {-1, 1}` (variable 0), voters `T_1..T_n`
/// (variables `1..=n`) and `F_1..F_n` (variables `n+1..=2n`), all in `{0, 1}`.
///
/// Linear semantics gives one pairwise factor per voter; logical and ratio
/// semantics give the two aggregates `phi_T`, `phi_F`. Prior factors follow.
pub fn build_voting_model(n: usize, semantics: Semantics, w: f64, priors: &VotingPriors) -> FactorGraph {
    assert!(n >= 1, "the voting model needs at least one voter per side");
    let (wt, wf) = priors.weights(n);
    let mut vars = vec![Variable::spin("Q")];
    vars.extend((1..=n).map(|i| Variable::binary(format!("T{i}"))));
    vars.extend((1..=n).map(|i| Variable::binary(format!("F{i}"))));
    let t = |i: usize| i + 1;
    let f = |i: usize| n + i + 1;

    // Inner value Q * voter, with Q at index 0 -> -1 and index 1 -> +1.
    let vote = |name: String, voter: usize, scale: f64| {
        TableFactor::new(name, vec![0, voter], vec![2, 2], vec![0.0, -scale, 0.0, scale])
            .expect("2x2 vote table")
    };

    let mut factors: Vec<Factor> = Vec::new();
    match semantics {
        Semantics::Linear => {
            factors.extend((0..n).map(|i| vote(format!("vote_T{}", i + 1), t(i), w).into()));
            factors.extend((0..n).map(|i| vote(format!("vote_F{}", i + 1), f(i), -w).into()));
        }
        Semantics::Logical | Semantics::Ratio => {
            let terms_t = (0..n).map(|i| vote(format!("phi_T[T{}]", i + 1), t(i), 1.0)).collect();
            let terms_f = (0..n).map(|i| vote(format!("phi_F[F{}]", i + 1), f(i), -1.0)).collect();
            factors.push(AggregateFactor::new("phi_T", w, semantics, terms_t).unwrap().into());
            factors.push(AggregateFactor::new("phi_F", w, semantics, terms_f).unwrap().into());
        }
    }
    let prior = |name: String, var: usize, weight: f64| -> Factor {
        TableFactor::new(name, vec![var], vec![2], vec![0.0, weight])
            .unwrap()
            .into()
    };
    factors.extend((0..n).map(|i| prior(format!("prior_T{}", i + 1), t(i), wt[i])));
    factors.extend((0..n).map(|i| prior(format!("prior_F{}", i + 1), f(i), wf[i])));
    FactorGraph::new(vars, factors).expect("voting model is well formed")
}

/// Binary path `x0 - x1 - ... - x_{n-1}` with one pairwise factor per edge;
/// `table(i)` supplies the 2x2 table of edge `i`.
pub fn build_path(n: usize, mut table: impl FnMut(usize) -> [f64; 4]) -> FactorGraph {
    let vars = (0..n).map(|i| Variable::binary(format!("x{i}"))).collect();
    let factors = (0..n.saturating_sub(1))
        .map(|i| {
            TableFactor::new(format!("e{i}"), vec![i, i + 1], vec![2, 2], table(i).to_vec())
                .unwrap()
                .into()
        })
        .collect();
    FactorGraph::new(vars, factors).unwrap()
}

/// Tree shapes between a star and a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeFamily {
    Path,
    Star,
    /// A spine path of `spine` nodes; the remaining nodes are leaves attached
    /// round-robin along the spine. `spine = 1` is a star, `spine = nodes` a path.
    Caterpillar { spine: usize },
}

impl TreeFamily {
    fn spine(self, nodes: usize) -> usize {
        match self {
            TreeFamily::Path => nodes,
            TreeFamily::Star => 1,
            TreeFamily::Caterpillar { spine } => spine.clamp(1, nodes),
        }
    }

    pub fn label(self) -> String {
        match self {
            TreeFamily::Path => "path".into(),
            TreeFamily::Star => "star".into(),
            TreeFamily::Caterpillar { spine } => format!("caterpillar{spine}"),
        }
    }
}

/// Tree edges `(parent, child)` for a family.
pub fn tree_edges(nodes: usize, family: TreeFamily) -> Vec<(usize, usize)> {
    let spine = family.spine(nodes);
    let mut edges: Vec<(usize, usize)> = (1..spine).map(|i| (i - 1, i)).collect();
    edges.extend((spine..nodes).map(|leaf| ((leaf - spine) % spine, leaf)));
    edges
}

#[derive(Debug, Clone)]
pub struct TreeIsing {
    pub graph: FactorGraph,
    pub family: TreeFamily,
    pub hierarchy_width: usize,
    /// Maximum-degree node, lowest index on ties.
    pub query: usize,
}

/// `±1` spins with one `w * x * y` factor per tree edge.
pub fn build_tree_ising(nodes: usize, family: TreeFamily, w: f64) -> TreeIsing {
    assert!(nodes >= 2, "a tree Ising model needs at least two nodes");
    let vars = (0..nodes).map(|i| Variable::spin(format!("s{i}"))).collect();
    let factors = tree_edges(nodes, family)
        .into_iter()
        .map(|(a, b)| {
            TableFactor::new(format!("J{a}_{b}"), vec![a, b], vec![2, 2], vec![w, -w, -w, w])
                .unwrap()
                .into()
        })
        .collect();
    let graph = FactorGraph::new(vars, factors).unwrap();
    let hierarchy_width = hierarchy_width_by_search(&graph);
    let max_degree = structural_bounds(&graph).degree_lower_bound;
    let query = (0..nodes)
        .find(|&v| graph.adjacent_factors(v).len() == max_degree)
        .unwrap_or(0);
    TreeIsing {
        graph,
        family,
        hierarchy_width,
        query,
    }
}

/// Shape limits for [`random_factor_graph`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomGraphSpec {
    pub max_variables: usize,
    pub max_factors: usize,
    /// Largest factor arity.
    pub max_arity: usize,
    /// Table entries and aggregate weights are uniform in `[-max_weight, max_weight]`.
    pub max_weight: f64,
    /// Largest domain size (at least 2).
    pub max_domain: usize,
    /// Probability that a factor is an aggregate with random semantics.
    pub aggregate_probability: f64,
}

impl Default for RandomGraphSpec {
    fn default() -> Self {
        RandomGraphSpec {
            max_variables: 6,
            max_factors: 5,
            max_arity: 3,
            max_weight: 1.0,
            max_domain: 2,
            aggregate_probability: 0.25,
        }
    }
}

/// A random graph with `1..=max_variables` variables and `0..=max_factors`
/// factors over distinct random scopes, drawn from stream `(seed, index)`.
pub fn random_factor_graph(seed: u64, index: u64, spec: &RandomGraphSpec) -> FactorGraph {
    let mut r = rng::stream(seed, index);
    let n = r.random_range(1..=spec.max_variables.max(1));
    let vars: Vec<Variable> = (0..n)
        .map(|i| {
            let k = r.random_range(2..=spec.max_domain.max(2));
            Variable::new(format!("x{i}"), (0..k as i64).collect())
        })
        .collect();
    let dims: Vec<usize> = vars.iter().map(Variable::domain_size).collect();
    let m = r.random_range(0..=spec.max_factors);
    let scope_of = |r: &mut rng::ChainRng| {
        let arity = r.random_range(1..=spec.max_arity.clamp(1, n));
        let mut pool: Vec<usize> = (0..n).collect();
        let mut scope = Vec::with_capacity(arity);
        for _ in 0..arity {
            scope.push(pool.swap_remove(r.random_range(0..pool.len())));
        }
        scope
    };
    let table = |r: &mut rng::ChainRng, name: String, scope: Vec<usize>| {
        let d: Vec<usize> = scope.iter().map(|&v| dims[v]).collect();
        TableFactor::from_fn(name, scope, d, |_| r.random_range(-spec.max_weight..=spec.max_weight)).unwrap()
    };
    let factors = (0..m)
        .map(|j| -> Factor {
            if r.random_bool(spec.aggregate_probability.clamp(0.0, 1.0)) {
                let semantics = Semantics::ALL[r.random_range(0..3)];
                let weight = r.random_range(-spec.max_weight..=spec.max_weight);
                let k = r.random_range(1..=2);
                let terms = (0..k)
                    .map(|t| {
                        let s = scope_of(&mut r);
                        table(&mut r, format!("f{j}[{t}]"), s)
                    })
                    .collect();
                AggregateFactor::new(format!("f{j}"), weight, semantics, terms).unwrap().into()
            } else {
                let s = scope_of(&mut r);
                table(&mut r, format!("f{j}"), s).into()
            }
        })
        .collect();
    FactorGraph::new(vars, factors).expect("random graph is well formed")
}
