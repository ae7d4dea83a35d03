//! Rendering behind the `hwgibbs` subcommands, plus the flat config format.
//!
//! A config file holds `key = value` lines; `#` starts a comment. Every CSV
//! written here opens with `# key = value` lines recording the command, its
//! options and the seed.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::experiment::{check_graph, BoundCheckRow};
use crate::fg::{FactorGraph, World};
use crate::sampler::{run_chain_checkpoints, run_coupling, Init, SamplerConfig};
use crate::spectral::{exact_mixing_time, relaxation_bound, spectral_report, BoundInputs, MIXING_THRESHOLD};

/// Parses a flat config. Duplicate keys are errors; values keep inner spaces.
pub fn parse_flat_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut pairs = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(i + 1, 1, "expected `key = value`"))?;
        let key = k.trim();
        if key.is_empty() {
            return Err(Error::parse(i + 1, 1, "empty key"));
        }
        if pairs.insert(key.to_string(), v.trim().to_string()).is_some() {
            return Err(Error::parse(i + 1, 1, format!("key `{key}` is set twice")));
        }
    }
    Ok(pairs)
}

/// `# key = value` header lines.
pub fn header(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("# {k} = {v}\n")).collect()
}

/// Number of evenly spaced checkpoints reported per chain by `sample`.
pub const SAMPLE_CHECKPOINTS: u64 = 10;

/// Running marginal estimates: one row per (checkpoint, chain, variable
/// value), with `variable` written as `name=label`. Chain `c` uses stream
/// `(seed, c)` from a uniform random start.
pub fn sample_csv(graph: &FactorGraph, steps: u64, chains: usize, seed: u64, query: Option<usize>) -> Result<String> {
    if steps == 0 || chains == 0 {
        return Err(Error::invalid("`steps` and `chains` must be positive"));
    }
    if let Some(q) = query {
        if q >= graph.num_variables() {
            return Err(Error::invalid(format!("query variable {q} does not exist")));
        }
    }
    let mut checkpoints: Vec<u64> = (1..=SAMPLE_CHECKPOINTS).map(|i| steps * i / SAMPLE_CHECKPOINTS).collect();
    checkpoints.retain(|&c| c > 0);
    checkpoints.dedup();
    let config = SamplerConfig {
        seed,
        steps,
        burn_in: 0,
        init: Init::Uniform,
    };
    let runs = (0..chains as u64)
        .into_par_iter()
        .map(|c| run_chain_checkpoints(graph, &config, c, &checkpoints))
        .collect::<Result<Vec<_>>>()?;
    let vars: Vec<usize> = match query {
        Some(q) => vec![q],
        None => (0..graph.num_variables()).collect(),
    };
    let mut out = String::from("step,chain,variable,estimate\n");
    for (k, &step) in checkpoints.iter().enumerate() {
        for (c, traces) in runs.iter().enumerate() {
            let trace = &traces[k];
            for &v in &vars {
                let var = graph.variable(v);
                for (i, p) in trace.marginal(v).into_iter().enumerate() {
                    writeln!(out, "{step},{c},{}={},{p}", var.name, var.domain[i]).unwrap();
                }
            }
        }
    }
    Ok(out)
}

/// Coupling times of `replicates` coupled pairs started from the all-first
/// and all-last value worlds; replicate `r` uses stream `(seed, r)`. An empty
/// `coupling_time` means the pair did not meet within `budget` steps.
pub fn coupling_csv(graph: &FactorGraph, budget: u64, replicates: usize, seed: u64) -> Result<String> {
    if replicates == 0 {
        return Err(Error::invalid("`chains` must be positive"));
    }
    let low = World::zeros(graph.num_variables());
    let high = World::new(graph.variables().iter().map(|v| v.domain_size() - 1).collect());
    let times = (0..replicates as u64)
        .into_par_iter()
        .map(|r| Ok(run_coupling(graph, &low, &high, budget, seed, r)?.coupling_time))
        .collect::<Result<Vec<_>>>()?;
    let mut out = String::from("replicate,coupling_time\n");
    for (r, t) in times.into_iter().enumerate() {
        match t {
            Some(t) => writeln!(out, "{r},{t}").unwrap(),
            None => writeln!(out, "{r},").unwrap(),
        }
    }
    Ok(out)
}

/// One row of bound inputs, the spectral gap and both mixing-time bounds;
/// `t_mix_exact` is left empty unless `mixing` is set.
pub fn spectral_csv(graph: &FactorGraph, mixing: bool) -> Result<String> {
    let inputs = BoundInputs::of(graph)?;
    let report = spectral_report(graph)?;
    let t_mix = if mixing {
        exact_mixing_time(graph)?.t_mix.to_string()
    } else {
        String::new()
    };
    let relax = relaxation_bound(report.gamma, report.pi_min, MIXING_THRESHOLD)?;
    Ok(format!(
        "n,s,e,M,hw,gamma,pi_min,t_mix_exact,theorem2_bound,relaxation_bound\n{},{},{},{},{},{},{},{},{},{}\n",
        inputs.n,
        inputs.s,
        inputs.e,
        inputs.m,
        inputs.hw,
        report.gamma,
        report.pi_min,
        t_mix,
        inputs.theorem2(),
        relax
    ))
}

/// Every lemma check on one graph as `check value bound pass` lines.
pub fn lemma_report(graph: &FactorGraph) -> Result<(String, bool)> {
    let rows: Vec<BoundCheckRow> = check_graph(0, graph)?;
    let mut out = String::new();
    for r in &rows {
        writeln!(out, "{} {} {} {}", r.check, r.value, r.bound, if r.pass { "ok" } else { "FAIL" }).unwrap();
    }
    Ok((out, rows.iter().all(|r| r.pass)))
}
