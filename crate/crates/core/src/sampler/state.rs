use rand::Rng;

use crate::error::Result;
use crate::fg::{softmax_in_place, Factor, FactorGraph, World};

/// Mutable Gibbs state over an immutable graph.
///
/// Aggregate factors keep a cached inner sum that is updated incrementally
/// when one of their variables changes, so a step costs time proportional to
/// the adjacent factors and the terms touching the resampled variable.
#[derive(Debug, Clone)]
pub struct GibbsSampler<'g> {
    graph: &'g FactorGraph,
    world: Vec<usize>,
    inner: Vec<f64>,
    updates: Vec<usize>,
    scratch: Vec<f64>,
}

impl<'g> GibbsSampler<'g> {
    pub fn new(graph: &'g FactorGraph, world: World) -> Result<Self> {
        graph.check_world(&world)?;
        let world = world.into_inner();
        let inner = graph
            .factors()
            .iter()
            .map(|f| match f {
                Factor::Aggregate(a) => a.inner_sum(&world),
                Factor::Table(_) => 0.0,
            })
            .collect();
        Ok(GibbsSampler {
            graph,
            world,
            inner,
            updates: vec![0; graph.num_factors()],
            scratch: Vec::new(),
        })
    }

    pub fn graph(&self) -> &'g FactorGraph {
        self.graph
    }

    pub fn values(&self) -> &[usize] {
        &self.world
    }

    pub fn world(&self) -> World {
        World::new(self.world.clone())
    }

    /// Conditional distribution of `var` given the current state.
    pub fn conditional_into(&self, var: usize, out: &mut Vec<f64>) {
        let size = self.graph.variable(var).domain_size();
        out.clear();
        out.resize(size, 0.0);
        let current = self.world[var];
        for &fi in self.graph.adjacent_factors(var) {
            match self.graph.factor(fi) {
                Factor::Table(t) => {
                    let pos = t.position(var).expect("adjacent factor holds var");
                    let stride = t.strides()[pos];
                    let base = t.offset(&self.world) - current * stride;
                    for (v, o) in out.iter_mut().enumerate() {
                        *o += t.table()[base + v * stride];
                    }
                }
                Factor::Aggregate(a) => {
                    let touching = a.terms_touching(var);
                    let mut without = self.inner[fi];
                    for &ti in touching {
                        without -= a.terms()[ti].value(&self.world);
                    }
                    for (v, o) in out.iter_mut().enumerate() {
                        let mut sum = without;
                        for &ti in touching {
                            let t = &a.terms()[ti];
                            let pos = t.position(var).expect("term holds var");
                            let stride = t.strides()[pos];
                            sum += t.table()[t.offset(&self.world) - current * stride + v * stride];
                        }
                        *o += a.weight * a.semantics.apply(sum);
                    }
                }
            }
        }
        softmax_in_place(out);
    }

    pub fn conditional(&self, var: usize) -> Vec<f64> {
        let mut out = Vec::new();
        self.conditional_into(var, &mut out);
        out
    }

    /// Assigns `value` to `var`, keeping aggregate caches in sync.
    pub fn set(&mut self, var: usize, value: usize) {
        let old = self.world[var];
        if old == value {
            return;
        }
        for &fi in self.graph.adjacent_factors(var) {
            if let Factor::Aggregate(a) = self.graph.factor(fi) {
                self.updates[fi] += 1;
                let touching = a.terms_touching(var);
                if self.updates[fi] >= touching.len().max(a.terms().len()) {
                    // Periodic exact refresh bounds floating-point drift.
                    self.world[var] = value;
                    self.inner[fi] = a.inner_sum(&self.world);
                    self.world[var] = old;
                    self.updates[fi] = 0;
                    continue;
                }
                let mut delta = 0.0;
                for &ti in touching {
                    let t = &a.terms()[ti];
                    let pos = t.position(var).expect("term holds var");
                    let stride = t.strides()[pos];
                    let off = t.offset(&self.world);
                    delta += t.table()[off - old * stride + value * stride] - t.table()[off];
                }
                self.inner[fi] += delta;
            }
        }
        self.world[var] = value;
    }

    /// Resamples `var` from its conditional.
    pub fn resample<R: Rng + ?Sized>(&mut self, var: usize, rng: &mut R) -> usize {
        let mut probs = std::mem::take(&mut self.scratch);
        self.conditional_into(var, &mut probs);
        let value = sample_index(&probs, rng.random::<f64>());
        self.scratch = probs;
        self.set(var, value);
        value
    }

    /// One random-scan step: a uniformly chosen variable is resampled.
    /// Returns the chosen variable.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let var = rng.random_range(0..self.graph.num_variables());
        self.resample(var, rng);
        var
    }
}

/// Inverse-CDF draw from `probs` with `u ∈ [0, 1)`.
pub(crate) fn sample_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding left `acc` slightly below 1: take the last value with mass.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// One random-scan Gibbs step from `world`.
pub fn gibbs_step<R: Rng + ?Sized>(graph: &FactorGraph, world: &World, rng: &mut R) -> Result<World> {
    let mut s = GibbsSampler::new(graph, world.clone())?;
    if graph.num_variables() > 0 {
        s.step(rng);
    }
    Ok(s.world())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fg::{conditional_distribution, TableFactor, Variable, WorldIndexer};
    use crate::models::{build_voting_model, VotingPriors};
    use crate::rng;
    use crate::Semantics;

    #[test]
    fn cached_conditionals_match_fresh_evaluation() {
        let mut r = rng::stream(5, 0);
        for sem in Semantics::ALL {
            let g = build_voting_model(3, sem, 0.7, &VotingPriors::Uniform { seed: 9 });
            let mut s = GibbsSampler::new(&g, World::zeros(g.num_variables())).unwrap();
            for _ in 0..500 {
                s.step(&mut r);
                for var in 0..g.num_variables() {
                    let fresh = conditional_distribution(&g, &s.world(), var).unwrap();
                    let cached = s.conditional(var);
                    for (a, b) in fresh.iter().zip(&cached) {
                        assert!((a - b).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn logical_query_conditional_example() {
        let g = build_voting_model(3, Semantics::Logical, 0.5, &VotingPriors::Zero);
        // t = (1, 0, 0), f = 0
        let world = g.world_from_labels(&[1, 1, 0, 0, 0, 0, 0]).unwrap();
        let s = GibbsSampler::new(&g, world).unwrap();
        let p = s.conditional(0);
        assert!((p[1] - 1.0 / (1.0 + (-1.0f64).exp())).abs() < 1e-15);
        assert!((p[1] - 0.7311).abs() < 1e-4);
    }

    #[test]
    fn zero_weights_give_uniform_writes() {
        let vars = vec![Variable::new("a", vec![0, 1, 2]), Variable::binary("b")];
        let f = TableFactor::new("z", vec![0, 1], vec![3, 2], vec![0.0; 6]).unwrap();
        let g = FactorGraph::new(vars, vec![f.into()]).unwrap();
        let mut r = rng::stream(1, 0);
        let mut s = GibbsSampler::new(&g, World::zeros(2)).unwrap();
        let mut hits = [[0u32; 3]; 2];
        let trials = 60_000;
        for _ in 0..trials {
            let var = s.step(&mut r);
            hits[var][s.values()[var]] += 1;
        }
        let per_var = [hits[0].iter().sum::<u32>(), hits[1].iter().sum::<u32>()];
        assert!((per_var[0] as f64 / trials as f64 - 0.5).abs() < 0.01);
        for v in 0..3 {
            assert!((hits[0][v] as f64 / per_var[0] as f64 - 1.0 / 3.0).abs() < 0.015);
        }
    }

    #[test]
    fn single_variable_reaches_stationarity_in_one_step() {
        // The one-step law from any start is the conditional, which is the
        // stationary distribution.
        let f = TableFactor::new("u", vec![0], vec![3], vec![0.2, -0.4, 1.0]).unwrap();
        let g = FactorGraph::new(vec![Variable::new("x", vec![0, 1, 2])], vec![f.into()]).unwrap();
        let pi = crate::fg::exact_joint(&g).unwrap().probabilities;
        let mut r = rng::stream(2, 0);
        let trials = 200_000;
        for start in 0..3 {
            let mut counts = [0u32; 3];
            for _ in 0..trials {
                let next = gibbs_step(&g, &World::new(vec![start]), &mut r).unwrap();
                counts[next[0]] += 1;
            }
            for v in 0..3 {
                let p = counts[v] as f64 / trials as f64;
                let se = (pi[v] * (1.0 - pi[v]) / trials as f64).sqrt();
                assert!((p - pi[v]).abs() < 4.0 * se, "start {start} value {v}");
            }
        }
        let ix = WorldIndexer::new(&g, 8).unwrap();
        assert_eq!(ix.size(), 3);
    }

    #[test]
    fn step_only_changes_chosen_variable() {
        let g = build_voting_model(2, Semantics::Ratio, 0.5, &VotingPriors::Zero);
        let mut r = rng::stream(3, 0);
        let mut s = GibbsSampler::new(&g, World::zeros(5)).unwrap();
        for _ in 0..200 {
            let before = s.values().to_vec();
            let var = s.step(&mut r);
            for (i, (a, b)) in before.iter().zip(s.values()).enumerate() {
                if i != var {
                    assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn sample_index_edges() {
        assert_eq!(sample_index(&[0.5, 0.5], 0.0), 0);
        assert_eq!(sample_index(&[0.5, 0.5], 0.5), 1);
        assert_eq!(sample_index(&[0.3, 0.7, 0.0], 0.999_999_999_999_999_9), 1);
    }
}
