use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fg::{exact_joint, FactorGraph, World};
use crate::rng;
use crate::sampler::chain::sample_joint;
use crate::sampler::state::GibbsSampler;

/// One-sided normal quantile used for the upper confidence band (level 0.999).
pub const BAND_Z: f64 = 3.090_232_306_167_813;

/// Draws a pair from the maximal coupling of `p` and `q` with one uniform.
///
/// Both laws are laid out as the shared overlap `min(p, q)` followed by
/// their own residual. A draw inside the overlap gives equal values; a draw
/// past it lands on disjoint residual supports.
pub fn maximal_coupling(p: &[f64], q: &[f64], u: f64) -> (usize, usize) {
    let overlap: f64 = p.iter().zip(q).map(|(a, b)| a.min(*b)).sum();
    if u < overlap {
        let mut acc = 0.0;
        for (i, (a, b)) in p.iter().zip(q).enumerate() {
            acc += a.min(*b);
            if u < acc {
                return (i, i);
            }
        }
    }
    let pick = |own: &[f64], other: &[f64]| {
        let mut acc = overlap;
        let mut last = None;
        for (i, (a, b)) in own.iter().zip(other).enumerate() {
            let r = (a - a.min(*b)).max(0.0);
            if r > 0.0 {
                last = Some(i);
            }
            acc += r;
            if u < acc {
                return i;
            }
        }
        // Rounding: fall back to the last value with residual or overlap mass.
        last.unwrap_or_else(|| own.iter().rposition(|&x| x > 0.0).unwrap_or(0))
    };
    (pick(p, q), pick(q, p))
}

/// Coupled pair of chains sharing the variable choice and a maximally
/// coupled value draw.
#[derive(Debug, Clone)]
pub struct CoupledChains<'g> {
    a: GibbsSampler<'g>,
    b: GibbsSampler<'g>,
    disagreements: usize,
    pa: Vec<f64>,
    pb: Vec<f64>,
}

impl<'g> CoupledChains<'g> {
    pub fn new(graph: &'g FactorGraph, a: World, b: World) -> Result<Self> {
        let a = GibbsSampler::new(graph, a)?;
        let b = GibbsSampler::new(graph, b)?;
        let disagreements = a.values().iter().zip(b.values()).filter(|(x, y)| x != y).count();
        Ok(CoupledChains {
            a,
            b,
            disagreements,
            pa: Vec::new(),
            pb: Vec::new(),
        })
    }

    pub fn disagreements(&self) -> usize {
        self.disagreements
    }

    pub fn worlds(&self) -> (World, World) {
        (self.a.world(), self.b.world())
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let n = self.a.graph().num_variables();
        let var = rng.random_range(0..n);
        let u = rng.random::<f64>();
        let before = self.a.values()[var] != self.b.values()[var];
        if self.disagreements == 0 {
            // Identical states have identical conditionals.
            self.a.conditional_into(var, &mut self.pa);
            let (x, _) = maximal_coupling(&self.pa, &self.pa, u);
            self.a.set(var, x);
            self.b.set(var, x);
            return var;
        }
        self.a.conditional_into(var, &mut self.pa);
        self.b.conditional_into(var, &mut self.pb);
        let (x, y) = maximal_coupling(&self.pa, &self.pb, u);
        self.a.set(var, x);
        self.b.set(var, y);
        let after = x != y;
        self.disagreements = self.disagreements + after as usize - before as usize;
        var
    }
}

/// One coupled step from a pair of worlds; the flag reports whether the
/// results still differ.
pub fn coupled_step<R: Rng + ?Sized>(
    graph: &FactorGraph,
    world_a: &World,
    world_b: &World,
    rng: &mut R,
) -> Result<(World, World, bool)> {
    let mut c = CoupledChains::new(graph, world_a.clone(), world_b.clone())?;
    if graph.num_variables() > 0 {
        c.step(rng);
    }
    let (a, b) = c.worlds();
    let unequal = c.disagreements() > 0;
    Ok((a, b, unequal))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingRecord {
    /// First step count after which the chains agree; `None` if they never
    /// met within the budget.
    pub coupling_time: Option<u64>,
    /// `disagreements[k]`: differing coordinates after `k` steps.
    pub disagreements: Vec<usize>,
}

/// Runs a coupled pair for up to `budget` steps on stream `(seed, stream)`.
pub fn run_coupling(
    graph: &FactorGraph,
    world_a: &World,
    world_b: &World,
    budget: u64,
    seed: u64,
    stream: u64,
) -> Result<CouplingRecord> {
    let mut c = CoupledChains::new(graph, world_a.clone(), world_b.clone())?;
    let mut r = rng::stream(seed, stream);
    let mut disagreements = vec![c.disagreements()];
    let mut coupling_time = (c.disagreements() == 0).then_some(0);
    for k in 1..=budget {
        if coupling_time.is_some() {
            disagreements.push(0);
            continue;
        }
        c.step(&mut r);
        disagreements.push(c.disagreements());
        if c.disagreements() == 0 {
            coupling_time = Some(k);
        }
    }
    Ok(CouplingRecord {
        coupling_time,
        disagreements,
    })
}

/// The second chain of each replicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Partner {
    /// Drawn from the exact joint, so the curve bounds distance to stationarity.
    Stationary,
    /// A fixed world; the curve bounds the distance between the two starts.
    Fixed(World),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingBoundPoint {
    pub step: u64,
    /// Fraction of replicates not yet coupled after `step` steps.
    pub estimate: f64,
    /// One-sided upper confidence bound on that probability.
    pub upper: f64,
}

/// Wilson score upper bound for a binomial proportion.
pub fn wilson_upper(successes: u64, trials: u64, z: f64) -> f64 {
    if trials == 0 {
        return 1.0;
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = p + z2 / (2.0 * n);
    let spread = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre + spread) / (1.0 + z2 / n)).min(1.0)
}

/// Estimates `P(T > k)` for `k = 0..=budget`, which upper-bounds the total
/// variation distance between the chain started at `start` and the partner
/// law. Replicate `r` uses stream `(seed, r)`.
pub fn tv_bound_from_coupling(
    graph: &FactorGraph,
    start: &World,
    partner: &Partner,
    budget: u64,
    replicates: usize,
    seed: u64,
) -> Result<Vec<CouplingBoundPoint>> {
    graph.check_world(start)?;
    if replicates == 0 {
        return Err(Error::invalid("at least one replicate is required"));
    }
    let joint = match partner {
        Partner::Stationary => Some(exact_joint(graph)?),
        Partner::Fixed(w) => {
            graph.check_world(w)?;
            None
        }
    };
    let times: Vec<Option<u64>> = (0..replicates as u64)
        .into_par_iter()
        .map(|rep| {
            let mut r = rng::stream(seed, rep);
            let other = match (&joint, partner) {
                (Some(j), _) => sample_joint(j, &mut r),
                (None, Partner::Fixed(w)) => w.clone(),
                (None, Partner::Stationary) => unreachable!("joint computed above"),
            };
            coupling_time(graph, start, other, budget, &mut r)
        })
        .collect::<Result<_>>()?;
    // survivors[k] = replicates with T > k.
    let mut survivors = vec![0u64; budget as usize + 1];
    for t in &times {
        let end = t.map_or(budget + 1, |t| t.min(budget + 1));
        for s in survivors.iter_mut().take(end as usize) {
            *s += 1;
        }
    }
    let total = replicates as u64;
    Ok(survivors
        .iter()
        .enumerate()
        .map(|(k, &s)| CouplingBoundPoint {
            step: k as u64,
            estimate: s as f64 / total as f64,
            upper: wilson_upper(s, total, BAND_Z),
        })
        .collect())
}

fn coupling_time(
    graph: &FactorGraph,
    a: &World,
    b: World,
    budget: u64,
    r: &mut rng::ChainRng,
) -> Result<Option<u64>> {
    let mut c = CoupledChains::new(graph, a.clone(), b)?;
    if c.disagreements() == 0 {
        return Ok(Some(0));
    }
    for k in 1..=budget {
        c.step(r);
        if c.disagreements() == 0 {
            return Ok(Some(k));
        }
    }
    Ok(None)
}
