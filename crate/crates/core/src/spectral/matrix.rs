use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fg::{FactorGraph, World, WorldIndexer};
use crate::sampler::GibbsSampler;

/// Largest state space for which a transition matrix is built.
pub const SPECTRAL_CAP: usize = 1 << 14;

/// Random-scan Gibbs kernel in compressed sparse rows.
///
/// Row `x` holds every world reachable in one step (those differing from `x`
/// in at most one variable), columns sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    indexer: WorldIndexer,
}

pub fn transition_matrix(graph: &FactorGraph) -> Result<TransitionMatrix> {
    transition_matrix_with_cap(graph, SPECTRAL_CAP)
}

pub fn transition_matrix_with_cap(graph: &FactorGraph, cap: usize) -> Result<TransitionMatrix> {
    let indexer = WorldIndexer::new(graph, cap)?;
    let n = graph.num_variables();
    let rows: Vec<Vec<(usize, f64)>> = (0..indexer.size())
        .into_par_iter()
        .map(|x| {
            let world = indexer.world(x);
            if n == 0 {
                return vec![(x, 1.0)];
            }
            let s = GibbsSampler::new(graph, world.clone()).expect("indexer worlds are valid");
            let mut cond = Vec::new();
            let mut row = Vec::new();
            let mut off = 0.0;
            for v in 0..n {
                s.conditional_into(v, &mut cond);
                let stride = indexer.stride(v);
                let base = x - world[v] * stride;
                for (val, &p) in cond.iter().enumerate() {
                    if val != world[v] {
                        let q = p / n as f64;
                        row.push((base + val * stride, q));
                        off += q;
                    }
                }
            }
            // Resampling the current value keeps the mass on the diagonal.
            row.push((x, 1.0 - off));
            row.sort_unstable_by_key(|e| e.0);
            row
        })
        .collect();
    let mut row_ptr = Vec::with_capacity(rows.len() + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0);
    for row in rows {
        for (c, v) in row {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    Ok(TransitionMatrix {
        row_ptr,
        cols,
        vals,
        indexer,
    })
}

impl TransitionMatrix {
    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn indexer(&self) -> &WorldIndexer {
        &self.indexer
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `(column, probability)` pairs of row `x`.
    pub fn row(&self, x: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[x]..self.row_ptr[x + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        let r = self.row_ptr[x]..self.row_ptr[x + 1];
        match self.cols[r.clone()].binary_search(&y) {
            Ok(i) => self.vals[r.start + i],
            Err(_) => 0.0,
        }
    }

    pub fn index_of(&self, world: &World) -> usize {
        self.indexer.index(world.as_slice())
    }

    /// Row vector times the kernel: the law after one more step.
    pub fn step_distribution(&self, mu: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.resize(self.dim(), 0.0);
        for (x, &m) in mu.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for (y, p) in self.row(x) {
                out[y] += m * p;
            }
        }
    }

    /// Largest deviation of a row sum from 1.
    pub fn row_sum_error(&self) -> f64 {
        (0..self.dim())
            .map(|x| (self.row(x).map(|e| e.1).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `max_y |(πP)(y) − π(y)|`.
    pub fn stationarity_error(&self, pi: &[f64]) -> f64 {
        let mut next = Vec::new();
        self.step_distribution(pi, &mut next);
        next.iter().zip(pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// `max |π(x)P(x,y) − π(y)P(y,x)|` over stored entries.
    pub fn detailed_balance_error(&self, pi: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for x in 0..self.dim() {
            for (y, p) in self.row(x) {
                worst = worst.max((pi[x] * p - pi[y] * self.get(y, x)).abs());
            }
        }
        worst
    }

    /// Checks that every stored entry joins worlds differing in at most one
    /// coordinate.
    pub fn single_site_support(&self) -> bool {
        (0..self.dim()).all(|x| {
            let wx = self.indexer.world(x);
            self.row(x).all(|(y, _)| {
                let wy = self.indexer.world(y);
                wx.as_slice().iter().zip(wy.as_slice()).filter(|(a, b)| a != b).count() <= 1
            })
        })
    }
}

pub(crate) fn check_len(a: usize, b: usize, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::invalid(format!("{what}: lengths {a} and {b} differ")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fg::{exact_joint, TableFactor, Variable};
    use crate::models::{build_voting_model, VotingPriors};
    use crate::Semantics;

    fn unary(w: f64) -> FactorGraph {
        let f = TableFactor::new("u", vec![0], vec![2], vec![0.0, w]).unwrap();
        FactorGraph::new(vec![Variable::binary("x")], vec![f.into()]).unwrap()
    }

    #[test]
    fn zero_weight_single_variable() {
        let p = transition_matrix(&unary(0.0)).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert!((p.get(x, y) - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn unary_rows_are_logistic() {
        let w: f64 = 1.3;
        let sigma = 1.0 / (1.0 + (-w).exp());
        let p = transition_matrix(&unary(w)).unwrap();
        for x in 0..2 {
            assert!((p.get(x, 0) - (1.0 - sigma)).abs() < 1e-15);
            assert!((p.get(x, 1) - sigma).abs() < 1e-15);
        }
    }

    #[test]
    fn two_free_variables_by_hand() {
        let g = FactorGraph::new(vec![Variable::binary("a"), Variable::binary("b")], Vec::new()).unwrap();
        let p = transition_matrix(&g).unwrap();
        for x in 0..4usize {
            for y in 0..4usize {
                let expect = match (x ^ y).count_ones() {
                    0 => 0.5,
                    1 => 0.25,
                    _ => 0.0,
                };
                assert!((p.get(x, y) - expect).abs() < 1e-15, "{x} {y}");
            }
        }
    }

    #[test]
    fn kernel_invariants_on_voting() {
        for sem in Semantics::ALL {
            let g = build_voting_model(2, sem, 0.7, &VotingPriors::Uniform { seed: 3 });
            let p = transition_matrix(&g).unwrap();
            let pi = exact_joint(&g).unwrap().probabilities;
            assert!(p.row_sum_error() < 1e-12);
            assert!(p.stationarity_error(&pi) < 1e-10);
            assert!(p.detailed_balance_error(&pi) < 1e-10);
            assert!(p.single_site_support());
            assert_eq!(p.nnz(), p.dim() * (g.num_variables() + 1));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let g = build_voting_model(8, Semantics::Logical, 0.5, &VotingPriors::Zero);
        assert!(matches!(transition_matrix(&g), Err(Error::ResourceLimit(_))));
    }
}
