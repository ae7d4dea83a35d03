use crate::error::{Error, Result};
use crate::fg::graph::{Factor, FactorGraph, World, WorldIndexer};
use crate::fg::jointree::JoinForest;

/// Default cap on the number of worlds enumerated by [`exact_joint`].
pub const DEFAULT_STATE_CAP: usize = 1 << 20;

/// `ε(I)`: the sum of all factor values at `world`.
pub fn energy(graph: &FactorGraph, world: &World) -> Result<f64> {
    graph.check_world(world)?;
    Ok(energy_unchecked(graph, world.as_slice()))
}

pub(crate) fn energy_unchecked(graph: &FactorGraph, world: &[usize]) -> f64 {
    graph.factors().iter().map(|f| f.value(world)).sum()
}

/// Numerically stable `log(sum(exp(xs)))`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Normalizes log-weights in place into probabilities.
pub(crate) fn softmax_in_place(xs: &mut [f64]) {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for x in xs.iter_mut() {
        *x = (*x - max).exp();
        total += *x;
    }
    for x in xs.iter_mut() {
        *x /= total;
    }
}

/// Distribution of `var` given the rest of `world`, re-evaluating only the
/// factors adjacent to `var`.
pub fn conditional_distribution(graph: &FactorGraph, world: &World, var: usize) -> Result<Vec<f64>> {
    graph.check_world(world)?;
    graph.check_variable(var)?;
    let mut scratch = world.as_slice().to_vec();
    let size = graph.variable(var).domain_size();
    let mut logits = vec![0.0; size];
    for (v, logit) in logits.iter_mut().enumerate() {
        scratch[var] = v;
        *logit = graph
            .adjacent_factors(var)
            .iter()
            .map(|&f| graph.factor(f).value(&scratch))
            .sum();
    }
    softmax_in_place(&mut logits);
    Ok(logits)
}

/// The full stationary distribution over worlds in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    pub probabilities: Vec<f64>,
    pub log_partition: f64,
    indexer: WorldIndexer,
}

impl JointTable {
    pub fn indexer(&self) -> &WorldIndexer {
        &self.indexer
    }

    pub fn probability(&self, world: &World) -> f64 {
        self.probabilities[self.indexer.index(world.as_slice())]
    }

    pub fn min_probability(&self) -> f64 {
        self.probabilities
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Per-variable marginals obtained by summing the joint.
    pub fn marginals(&self) -> Vec<Vec<f64>> {
        let dims = self.indexer.dims();
        let mut out: Vec<Vec<f64>> = dims.iter().map(|&d| vec![0.0; d]).collect();
        self.indexer.for_each(|idx, w| {
            let p = self.probabilities[idx];
            for (m, &x) in out.iter_mut().zip(w) {
                m[x] += p;
            }
        });
        out
    }
}

impl PartialEq for WorldIndexer {
    fn eq(&self, other: &Self) -> bool {
        self.dims() == other.dims()
    }
}

pub fn exact_joint(graph: &FactorGraph) -> Result<JointTable> {
    exact_joint_with_cap(graph, DEFAULT_STATE_CAP)
}

pub fn exact_joint_with_cap(graph: &FactorGraph, cap: usize) -> Result<JointTable> {
    let indexer = WorldIndexer::new(graph, cap)?;
    let mut energies = vec![0.0; indexer.size()];
    indexer.for_each(|idx, w| energies[idx] = energy_unchecked(graph, w));
    let log_partition = log_sum_exp(&energies);
    let probabilities = energies
        .iter()
        .map(|e| (e - log_partition).exp())
        .collect();
    Ok(JointTable {
        probabilities,
        log_partition,
        indexer,
    })
}

/// `M`: the largest value range of any factor (0 for a factorless graph).
pub fn max_factor_weight(graph: &FactorGraph) -> f64 {
    graph
        .factors()
        .iter()
        .map(Factor::weight_range)
        .fold(0.0, f64::max)
}

/// Largest dense table materialized while eliminating along a join tree.
pub const DEFAULT_CLIQUE_CAP: usize = 1 << 16;

/// Exact per-variable marginals for acyclic (GYO-reducible) graphs by
/// sum-product over a join forest.
pub fn exact_marginals_acyclic(graph: &FactorGraph) -> Result<Vec<Vec<f64>>> {
    let forest = JoinForest::build(graph).ok_or_else(|| {
        Error::UnsupportedStructure(
            "hypergraph is not acyclic; use exact_joint instead".to_string(),
        )
    })?;
    let mut potentials = Vec::with_capacity(graph.num_factors());
    for (fi, f) in graph.factors().iter().enumerate() {
        potentials.push(LogTable::from_factor(graph, fi, f)?);
    }
    // Upward pass: leaves first.
    let order = forest.elimination_order();
    let mut up_msgs: Vec<Option<LogTable>> = vec![None; graph.num_factors()];
    for &child in order {
        if let Some(parent) = forest.parent(child) {
            let shared = intersect(&potentials[child].scope, &potentials[parent].scope);
            let msg = potentials[child].marginalize_onto(&shared);
            potentials[parent].absorb(&msg);
            up_msgs[child] = Some(msg);
        }
    }
    // Downward pass: roots first.
    for &child in order.iter().rev() {
        if let Some(parent) = forest.parent(child) {
            let up = up_msgs[child].as_ref().expect("upward message recorded");
            let mut down = potentials[parent].marginalize_onto(&up.scope);
            down.subtract(up);
            potentials[child].absorb(&down);
        }
    }
    let mut marginals: Vec<Option<Vec<f64>>> = vec![None; graph.num_variables()];
    for table in &potentials {
        for &v in &table.scope {
            if marginals[v].is_none() {
                let mut m = table.marginalize_onto(&[v]).values;
                softmax_in_place(&mut m);
                marginals[v] = Some(m);
            }
        }
    }
    Ok(marginals
        .into_iter()
        .enumerate()
        .map(|(v, m)| {
            m.unwrap_or_else(|| {
                let s = graph.variable(v).domain_size();
                vec![1.0 / s as f64; s]
            })
        })
        .collect())
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|v| b.contains(v)).collect()
}

/// Dense log-potential over a sorted scope, row-major.
#[derive(Debug, Clone)]
struct LogTable {
    scope: Vec<usize>,
    dims: Vec<usize>,
    values: Vec<f64>,
}

impl LogTable {
    fn from_factor(graph: &FactorGraph, index: usize, factor: &Factor) -> Result<Self> {
        let mut scope = factor.scope().to_vec();
        scope.sort_unstable();
        let dims: Vec<usize> = scope
            .iter()
            .map(|&v| graph.variable(v).domain_size())
            .collect();
        let size = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .filter(|&s| s <= DEFAULT_CLIQUE_CAP)
            .ok_or_else(|| {
                Error::limit(format!(
                    "factor {index} spans {} variables, too large to tabulate",
                    scope.len()
                ))
            })?;
        let mut world = vec![0usize; graph.num_variables()];
        let mut values = Vec::with_capacity(size);
        let mut assignment = vec![0usize; scope.len()];
        for _ in 0..size {
            for (&v, &x) in scope.iter().zip(&assignment) {
                world[v] = x;
            }
            values.push(factor.value(&world));
            advance(&mut assignment, &dims);
        }
        Ok(LogTable {
            scope,
            dims,
            values,
        })
    }

    /// Log-sum-exp out every variable not in `keep` (a subset of the scope).
    fn marginalize_onto(&self, keep: &[usize]) -> LogTable {
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        let keep_pos: Vec<usize> = keep
            .iter()
            .map(|v| self.scope.iter().position(|s| s == v).expect("subset"))
            .collect();
        let dims: Vec<usize> = keep_pos.iter().map(|&p| self.dims[p]).collect();
        let size: usize = dims.iter().product();
        let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); size];
        let mut assignment = vec![0usize; self.scope.len()];
        for &val in &self.values {
            let mut idx = 0;
            for (&p, &d) in keep_pos.iter().zip(&dims) {
                idx = idx * d + assignment[p];
            }
            buckets[idx].push(val);
            advance(&mut assignment, &self.dims);
        }
        LogTable {
            scope: keep,
            dims,
            values: buckets.iter().map(|b| log_sum_exp(b)).collect(),
        }
    }

    /// Adds `other` (whose scope is a subset of ours) into this table.
    fn absorb(&mut self, other: &LogTable) {
        self.combine(other, 1.0);
    }

    fn subtract(&mut self, other: &LogTable) {
        self.combine(other, -1.0);
    }

    fn combine(&mut self, other: &LogTable, sign: f64) {
        let pos: Vec<usize> = other
            .scope
            .iter()
            .map(|v| self.scope.iter().position(|s| s == v).expect("subset"))
            .collect();
        let mut assignment = vec![0usize; self.scope.len()];
        for val in self.values.iter_mut() {
            let mut idx = 0;
            for (&p, &d) in pos.iter().zip(&other.dims) {
                idx = idx * d + assignment[p];
            }
            *val += sign * other.values[idx];
            advance(&mut assignment, &self.dims);
        }
    }
}

fn advance(assignment: &mut [usize], dims: &[usize]) {
    for i in (0..dims.len()).rev() {
        assignment[i] += 1;
        if assignment[i] < dims[i] {
            return;
        }
        assignment[i] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fg::graph::{TableFactor, Variable};

    fn unary(w: f64) -> FactorGraph {
        let f = TableFactor::new("u", vec![0], vec![2], vec![0.0, w]).unwrap();
        FactorGraph::new(vec![Variable::binary("x")], vec![f.into()]).unwrap()
    }

    fn logistic(x: f64) -> f64 {
        1.0 / (1.0 + (-x).exp())
    }

    #[test]
    fn empty_graph_energy_is_zero() {
        let g = FactorGraph::new(vec![Variable::binary("a"), Variable::spin("b")], vec![]).unwrap();
        assert_eq!(energy(&g, &World::new(vec![1, 0])).unwrap(), 0.0);
    }

    #[test]
    fn energy_rejects_wrong_length() {
        let g = unary(0.3);
        assert!(matches!(
            energy(&g, &World::new(vec![0, 0])),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn unary_conditional_is_logistic() {
        let g = unary(0.7);
        let p = conditional_distribution(&g, &World::new(vec![0]), 0).unwrap();
        assert!((p[1] - logistic(0.7)).abs() < 1e-15);
        assert!((p[1] - 0.6682).abs() < 1e-4);
    }

    #[test]
    fn isolated_variable_conditional_is_uniform() {
        let g = FactorGraph::new(vec![Variable::new("x", vec![0, 1, 2])], vec![]).unwrap();
        let p = conditional_distribution(&g, &World::new(vec![2]), 0).unwrap();
        for x in p {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn conditional_rejects_bad_variable() {
        let g = unary(0.1);
        assert!(conditional_distribution(&g, &World::new(vec![0]), 1).is_err());
    }

    #[test]
    fn zero_weight_joint_is_uniform() {
        let j = exact_joint(&unary(0.0)).unwrap();
        assert_eq!(j.probabilities, vec![0.5, 0.5]);
        assert!((j.log_partition - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn unary_joint_is_logistic() {
        let j = exact_joint(&unary(-1.3)).unwrap();
        assert!((j.probabilities[1] - logistic(-1.3)).abs() < 1e-15);
    }

    #[test]
    fn joint_cap_is_enforced() {
        let vars = (0..6).map(|i| Variable::binary(format!("x{i}"))).collect();
        let g = FactorGraph::new(vars, vec![]).unwrap();
        assert!(matches!(
            exact_joint_with_cap(&g, 32),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn max_weight_of_empty_graph() {
        let g = FactorGraph::new(vec![Variable::binary("x")], vec![]).unwrap();
        assert_eq!(max_factor_weight(&g), 0.0);
    }

    #[test]
    fn chain_marginals_agree() {
        let vars = (0..3).map(|i| Variable::binary(format!("x{i}"))).collect();
        let f0 = TableFactor::new("a", vec![0, 1], vec![2, 2], vec![0.3, -0.2, 0.5, 1.1]).unwrap();
        let f1 = TableFactor::new("b", vec![2, 1], vec![2, 2], vec![-0.7, 0.4, 0.2, 0.0]).unwrap();
        let g = FactorGraph::new(vars, vec![f0.into(), f1.into()]).unwrap();
        let brute = exact_joint(&g).unwrap().marginals();
        let tree = exact_marginals_acyclic(&g).unwrap();
        for (a, b) in brute.iter().flatten().zip(tree.iter().flatten()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cyclic_graph_is_unsupported() {
        let vars = (0..3).map(|i| Variable::binary(format!("x{i}"))).collect();
        let mk = |n: &str, a, b| -> Factor {
            TableFactor::new(n, vec![a, b], vec![2, 2], vec![0.0, 1.0, 1.0, 0.0])
                .unwrap()
                .into()
        };
        let g = FactorGraph::new(vars, vec![mk("a", 0, 1), mk("b", 1, 2), mk("c", 2, 0)]).unwrap();
        assert!(matches!(
            exact_marginals_acyclic(&g),
            Err(Error::UnsupportedStructure(_))
        ));
    }

    #[test]
    fn zero_path_marginals_uniform() {
        let vars = (0..4).map(|i| Variable::binary(format!("x{i}"))).collect();
        let factors = (0..3)
            .map(|i| {
                TableFactor::new(format!("f{i}"), vec![i, i + 1], vec![2, 2], vec![0.0; 4])
                    .unwrap()
                    .into()
            })
            .collect();
        let g = FactorGraph::new(vars, factors).unwrap();
        for m in exact_marginals_acyclic(&g).unwrap() {
            assert!((m[0] - 0.5).abs() < 1e-15 && (m[1] - 0.5).abs() < 1e-15);
        }
    }
}
