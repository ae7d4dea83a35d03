use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fg::{exact_joint, FactorGraph, JointTable, World};
use crate::rng::{self, ChainRng};
use crate::sampler::state::{sample_index, GibbsSampler};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Init {
    Fixed(World),
    /// Every variable drawn uniformly from its domain.
    Uniform,
    /// A world drawn from the exact joint (small graphs only).
    Stationary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub steps: u64,
    pub burn_in: u64,
    pub init: Init,
}

impl SamplerConfig {
    pub fn new(seed: u64, steps: u64) -> Self {
        SamplerConfig {
            seed,
            steps,
            burn_in: 0,
            init: Init::Uniform,
        }
    }
}

/// Post-burn-in value counts of a chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainTrace {
    /// `counts[v][x]`: recorded steps at which variable `v` held value `x`.
    pub counts: Vec<Vec<u64>>,
    pub final_world: World,
    pub steps: u64,
}

impl ChainTrace {
    pub fn marginal(&self, var: usize) -> Vec<f64> {
        let steps = self.steps.max(1) as f64;
        self.counts[var].iter().map(|&c| c as f64 / steps).collect()
    }

    pub fn marginals(&self) -> Vec<Vec<f64>> {
        (0..self.counts.len()).map(|v| self.marginal(v)).collect()
    }
}

pub(crate) fn uniform_world<R: Rng + ?Sized>(graph: &FactorGraph, rng: &mut R) -> World {
    World::new(
        graph
            .variables()
            .iter()
            .map(|v| rng.random_range(0..v.domain_size()))
            .collect(),
    )
}

pub(crate) fn sample_joint<R: Rng + ?Sized>(joint: &JointTable, rng: &mut R) -> World {
    let idx = sample_index(&joint.probabilities, rng.random::<f64>());
    joint.indexer().world(idx)
}

pub(crate) fn initial_world(graph: &FactorGraph, init: &Init, rng: &mut ChainRng) -> Result<World> {
    match init {
        Init::Fixed(w) => {
            graph.check_world(w)?;
            Ok(w.clone())
        }
        Init::Uniform => Ok(uniform_world(graph, rng)),
        Init::Stationary => Ok(sample_joint(&exact_joint(graph)?, rng)),
    }
}

/// Runs `burn_in + steps` random-scan steps on stream `(seed, 0)`.
pub fn run_chain(graph: &FactorGraph, config: &SamplerConfig) -> Result<ChainTrace> {
    run_chain_on_stream(graph, config, 0)
}

pub fn run_chain_on_stream(graph: &FactorGraph, config: &SamplerConfig, stream: u64) -> Result<ChainTrace> {
    let mut traces = run_chain_checkpoints(graph, config, stream, &[config.steps])?;
    Ok(traces.pop().expect("one checkpoint"))
}

/// Like [`run_chain_on_stream`], but snapshots the counts after each of the
/// strictly increasing step counts in `checkpoints`; the last one must equal
/// `config.steps`.
pub fn run_chain_checkpoints(
    graph: &FactorGraph,
    config: &SamplerConfig,
    stream: u64,
    checkpoints: &[u64],
) -> Result<Vec<ChainTrace>> {
    if config.steps == 0 {
        return Err(Error::invalid("a chain needs at least one recorded step"));
    }
    if checkpoints.last() != Some(&config.steps)
        || checkpoints[0] == 0
        || checkpoints.windows(2).any(|p| p[0] >= p[1])
    {
        return Err(Error::invalid("checkpoints must be positive, increasing and end at the step count"));
    }
    let mut r = rng::stream(config.seed, stream);
    let start = initial_world(graph, &config.init, &mut r)?;
    let mut s = GibbsSampler::new(graph, start)?;
    let n = graph.num_variables();
    if n == 0 {
        return Ok(checkpoints
            .iter()
            .map(|&steps| ChainTrace {
                counts: Vec::new(),
                final_world: s.world(),
                steps,
            })
            .collect());
    }
    for _ in 0..config.burn_in {
        s.step(&mut r);
    }
    // Values are accounted lazily: a variable's run is credited when it
    // changes or at a checkpoint.
    let mut counts: Vec<Vec<u64>> = graph.variables().iter().map(|v| vec![0; v.domain_size()]).collect();
    let mut since = vec![0u64; n];
    let mut traces = Vec::with_capacity(checkpoints.len());
    let mut t = 0u64;
    for &stop in checkpoints {
        while t < stop {
            let var = r.random_range(0..n);
            let old = s.values()[var];
            let new = s.resample(var, &mut r);
            if new != old {
                counts[var][old] += t - since[var];
                since[var] = t;
            }
            t += 1;
        }
        let mut snapshot = counts.clone();
        for v in 0..n {
            snapshot[v][s.values()[v]] += stop - since[v];
        }
        traces.push(ChainTrace {
            counts: snapshot,
            final_world: s.world(),
            steps: stop,
        });
    }
    Ok(traces)
}

/// Across-chain statistics of a running marginal estimate at one budget.
#[derive(Debug, Clone, PartialEq)]
pub struct VariancePoint {
    pub iterations: u64,
    pub mean: f64,
    /// Unbiased sample variance across chains.
    pub variance: f64,
}

/// For each budget in `schedule`, the across-chain variance of the running
/// estimate of `P(var = value)`. Chain `c` uses stream `(seed, c)` and
/// starts from a uniformly random world; there is no burn-in.
pub fn marginal_variance_experiment(
    graph: &FactorGraph,
    var: usize,
    value: usize,
    chains: usize,
    schedule: &[u64],
    seed: u64,
) -> Result<Vec<VariancePoint>> {
    let streams: Vec<(u64, u64)> = (0..chains as u64).map(|c| (seed, c)).collect();
    marginal_variance_with_streams(graph, var, value, &streams, schedule)
}

/// As [`marginal_variance_experiment`] with explicit `(seed, stream)` pairs.
pub fn marginal_variance_with_streams(
    graph: &FactorGraph,
    var: usize,
    value: usize,
    streams: &[(u64, u64)],
    schedule: &[u64],
) -> Result<Vec<VariancePoint>> {
    graph.check_variable(var)?;
    if streams.len() < 2 {
        return Err(Error::invalid("variance needs at least two chains"));
    }
    if value >= graph.variable(var).domain_size() {
        return Err(Error::invalid(format!("value index {value} out of range")));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) || schedule.first() == Some(&0) {
        return Err(Error::invalid("schedule must be positive and strictly increasing"));
    }
    let estimates: Vec<Vec<f64>> = streams
        .par_iter()
        .map(|&(seed, stream)| running_estimates(graph, var, value, seed, stream, schedule))
        .collect::<Result<_>>()?;
    let k = streams.len() as f64;
    Ok(schedule
        .iter()
        .enumerate()
        .map(|(i, &iterations)| {
            let mean = estimates.iter().map(|e| e[i]).sum::<f64>() / k;
            let variance = estimates.iter().map(|e| (e[i] - mean).powi(2)).sum::<f64>() / (k - 1.0);
            VariancePoint {
                iterations,
                mean,
                variance,
            }
        })
        .collect())
}

fn running_estimates(
    graph: &FactorGraph,
    var: usize,
    value: usize,
    seed: u64,
    stream: u64,
    schedule: &[u64],
) -> Result<Vec<f64>> {
    let mut r = rng::stream(seed, stream);
    let start = uniform_world(graph, &mut r);
    let mut s = GibbsSampler::new(graph, start)?;
    let mut hits = 0u64;
    let mut out = Vec::with_capacity(schedule.len());
    let mut t = 0u64;
    for &budget in schedule {
        while t < budget {
            s.step(&mut r);
            if s.values()[var] == value {
                hits += 1;
            }
            t += 1;
        }
        out.push(hits as f64 / budget as f64);
    }
    Ok(out)
}
