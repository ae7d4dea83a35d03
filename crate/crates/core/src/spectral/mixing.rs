use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fg::{exact_joint, FactorGraph, World};
use crate::spectral::matrix::{check_len, transition_matrix, TransitionMatrix};

/// Largest state space for which every point-mass start is iterated.
pub const ALL_STARTS_CAP: usize = 1 << 11;

/// Steps after which the mixing-time iteration gives up.
pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

pub const MIXING_THRESHOLD: f64 = 0.25;

/// `½ Σ |μ − ν|`.
pub fn total_variation(mu: &[f64], nu: &[f64]) -> Result<f64> {
    check_len(mu.len(), nu.len(), "total variation")?;
    Ok(0.5 * mu.iter().zip(nu).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

fn tv_unchecked(mu: &[f64], nu: &[f64]) -> f64 {
    0.5 * mu.iter().zip(nu).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// `TV(P^t(x, ·), π)` for `t = 0..=steps`.
pub fn tv_curve(p: &TransitionMatrix, pi: &[f64], start: usize, steps: u64) -> Result<Vec<f64>> {
    check_len(p.dim(), pi.len(), "kernel and stationary distribution")?;
    if start >= p.dim() {
        return Err(Error::invalid(format!("start index {start} out of range")));
    }
    let mut mu = vec![0.0; p.dim()];
    mu[start] = 1.0;
    let mut next = Vec::new();
    let mut out = vec![tv_unchecked(&mu, pi)];
    for _ in 0..steps {
        p.step_distribution(&mu, &mut next);
        std::mem::swap(&mut mu, &mut next);
        out.push(tv_unchecked(&mu, pi));
    }
    Ok(out)
}

/// `d(t) = max_x TV(P^t(x, ·), π)` for `t = 0..=steps`.
pub fn worst_case_tv_curve(p: &TransitionMatrix, pi: &[f64], steps: u64) -> Result<Vec<f64>> {
    let curves: Vec<Vec<f64>> = (0..p.dim())
        .into_par_iter()
        .map(|x| tv_curve(p, pi, x, steps))
        .collect::<Result<_>>()?;
    Ok((0..=steps as usize)
        .map(|t| curves.iter().map(|c| c[t]).fold(0.0, f64::max))
        .collect())
}

/// First `t` with `TV(P^t(x, ·), π) ≤ threshold`.
fn first_passage(p: &TransitionMatrix, pi: &[f64], start: usize, threshold: f64, max_steps: u64) -> Option<u64> {
    let mut mu = vec![0.0; p.dim()];
    mu[start] = 1.0;
    let mut next = Vec::new();
    for t in 0..=max_steps {
        if tv_unchecked(&mu, pi) <= threshold {
            return Some(t);
        }
        p.step_distribution(&mu, &mut next);
        std::mem::swap(&mut mu, &mut next);
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixingTime {
    pub t_mix: u64,
    /// A start attaining `t_mix`.
    pub start: World,
    /// Whether every start was iterated; otherwise `t_mix` is the value for a
    /// designated start and only bounds the true mixing time from below.
    pub all_starts: bool,
}

/// Worst-case-start mixing time; every point-mass start is iterated.
/// Distance to stationarity is nonincreasing in `t` for each start, so the
/// worst start's first passage is the mixing time.
pub fn exact_mixing_time(graph: &FactorGraph) -> Result<MixingTime> {
    exact_mixing_time_with(graph, DEFAULT_MAX_STEPS)
}

pub fn exact_mixing_time_with(graph: &FactorGraph, max_steps: u64) -> Result<MixingTime> {
    if let Some(size) = graph.state_space_size() {
        if size > ALL_STARTS_CAP {
            return Err(Error::limit(format!(
                "worst-case start needs at most {ALL_STARTS_CAP} worlds, graph has {size}; use a designated start"
            )));
        }
    }
    let p = transition_matrix(graph)?;
    let pi = exact_joint(graph)?.probabilities;
    mixing_time_over_starts(&p, &pi, (0..p.dim()).collect(), max_steps, true)
}

/// First passage below ¼ from one designated start.
pub fn exact_mixing_time_from(graph: &FactorGraph, start: &World) -> Result<MixingTime> {
    graph.check_world(start)?;
    let p = transition_matrix(graph)?;
    let pi = exact_joint(graph)?.probabilities;
    let x = p.index_of(start);
    mixing_time_over_starts(&p, &pi, vec![x], DEFAULT_MAX_STEPS, false)
}

/// Mixing time from precomputed parts.
pub fn mixing_time_of(p: &TransitionMatrix, pi: &[f64]) -> Result<MixingTime> {
    check_len(p.dim(), pi.len(), "kernel and stationary distribution")?;
    mixing_time_over_starts(p, pi, (0..p.dim()).collect(), DEFAULT_MAX_STEPS, true)
}

fn mixing_time_over_starts(
    p: &TransitionMatrix,
    pi: &[f64],
    starts: Vec<usize>,
    max_steps: u64,
    all_starts: bool,
) -> Result<MixingTime> {
    let times: Vec<Option<u64>> = starts
        .par_iter()
        .map(|&x| first_passage(p, pi, x, MIXING_THRESHOLD, max_steps))
        .collect();
    let mut best: Option<(u64, usize)> = None;
    for (&x, t) in starts.iter().zip(&times) {
        let t = t.ok_or_else(|| Error::limit(format!("distance stayed above 1/4 for {max_steps} steps")))?;
        if best.is_none_or(|(bt, _)| t > bt) {
            best = Some((t, x));
        }
    }
    let (t_mix, x) = best.ok_or_else(|| Error::invalid("no start worlds"))?;
    Ok(MixingTime {
        t_mix,
        start: p.indexer().world(x),
        all_starts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fg::{TableFactor, Variable};
    use crate::models::{build_voting_model, VotingPriors};
    use crate::Semantics;

    #[test]
    fn tv_examples() {
        assert_eq!(total_variation(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert_eq!(total_variation(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert!((total_variation(&[0.75, 0.25], &[0.5, 0.5]).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(total_variation(&[1.0], &[0.5, 0.5]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn single_binary_variable_mixes_in_one_step() {
        for w in [0.0, 0.4, -2.0] {
            let f = TableFactor::new("u", vec![0], vec![2], vec![0.0, w]).unwrap();
            let g = FactorGraph::new(vec![Variable::binary("x")], vec![f.into()]).unwrap();
            assert_eq!(exact_mixing_time(&g).unwrap().t_mix, 1);
        }
    }

    #[test]
    fn two_free_binary_variables() {
        // From a corner, after t ≥ 1 steps exactly one coordinate is still
        // untouched with probability 2^{1-t}; touched coordinates are uniform.
        // That leaves P(start) = 1/4 + 2^{-t}/2, P(opposite) = 1/4 − 2^{-t}/2
        // and the two neighbours at 1/4, so d(t) = 2^{-t}/2.
        let g = FactorGraph::new(vec![Variable::binary("a"), Variable::binary("b")], Vec::new()).unwrap();
        let p = transition_matrix(&g).unwrap();
        let d = worst_case_tv_curve(&p, &[0.25; 4], 6).unwrap();
        assert!((d[0] - 0.75).abs() < 1e-15);
        for (t, &dt) in d.iter().enumerate().skip(1) {
            assert!((dt - 0.5f64.powi(t as i32 + 1)).abs() < 1e-15, "t={t}");
        }
        // d(1) = 1/4 exactly meets the threshold.
        assert_eq!(exact_mixing_time(&g).unwrap().t_mix, 1);
    }

    #[test]
    fn distance_is_nonincreasing() {
        for sem in Semantics::ALL {
            let g = build_voting_model(2, sem, 0.8, &VotingPriors::Uniform { seed: 7 });
            let p = transition_matrix(&g).unwrap();
            let pi = exact_joint(&g).unwrap().probabilities;
            let d = worst_case_tv_curve(&p, &pi, 60).unwrap();
            assert!(d.windows(2).all(|w| w[1] <= w[0] + 1e-12));
            let m = mixing_time_of(&p, &pi).unwrap();
            assert!(d[m.t_mix as usize] <= 0.25);
            assert!(m.t_mix == 0 || d[m.t_mix as usize - 1] > 0.25);
        }
    }

    #[test]
    fn designated_start_is_a_lower_bound() {
        let g = build_voting_model(2, Semantics::Linear, 0.5, &VotingPriors::Zero);
        let all = exact_mixing_time(&g).unwrap();
        let one = exact_mixing_time_from(&g, &World::zeros(5)).unwrap();
        assert!(all.all_starts && !one.all_starts);
        assert!(one.t_mix <= all.t_mix);
    }
}
