//! Experiment drivers and their flat `key = value` configuration.
//!
//! Every CSV starts with the full configuration as `# key = value` lines,
//! so a file can be regenerated from its own header.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::cli::parse_flat_config;
use crate::error::{Error, Result};
use crate::fg::{exact_marginals_acyclic, Semantics};
use crate::models::{
    build_tree_ising, build_voting_model, random_factor_graph, RandomGraphSpec, TreeFamily, VotingPriors,
};
use crate::sampler::{marginal_variance_experiment, run_chain_on_stream, Init, SamplerConfig};
use crate::spectral::{
    check_components, check_factor_removal, check_sandwich, exact_mixing_time, relaxation_bound, spectral_report,
    transition_matrix, BoundInputs, LEMMA_TOLERANCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    VotingConvergence,
    IsingHw,
    VerifyBounds,
    VotingMixing,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 4] = [
        ExperimentKind::VotingConvergence,
        ExperimentKind::IsingHw,
        ExperimentKind::VerifyBounds,
        ExperimentKind::VotingMixing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::VotingConvergence => "voting-convergence",
            ExperimentKind::IsingHw => "ising-hw",
            ExperimentKind::VerifyBounds => "verify-bounds",
            ExperimentKind::VotingMixing => "voting-mixing",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown experiment `{s}`")))
    }
}

/// Spine length of the intermediate caterpillar used by default.
pub fn mid_caterpillar(nodes: usize) -> TreeFamily {
    TreeFamily::Caterpillar {
        spine: (nodes as f64).sqrt().round().max(2.0) as usize,
    }
}

fn parse_family(s: &str) -> Result<TreeFamily> {
    match s {
        "path" => Ok(TreeFamily::Path),
        "star" => Ok(TreeFamily::Star),
        other => other
            .strip_prefix("caterpillar")
            .and_then(|k| k.parse().ok())
            .filter(|&k: &usize| k >= 1)
            .map(|spine| TreeFamily::Caterpillar { spine })
            .ok_or_else(|| Error::invalid(format!("unknown graph family `{other}`"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    /// Voters per side (voting-convergence).
    pub n: usize,
    /// Vote weight for the voting experiments.
    pub w: f64,
    pub prior_seed: u64,
    pub semantics: Vec<Semantics>,
    pub chains: usize,
    pub schedule: Vec<u64>,
    /// Tree size, coupling weights, families and per-chain budget (ising-hw).
    pub nodes: usize,
    pub weights: Vec<f64>,
    pub families: Vec<TreeFamily>,
    pub budget: u64,
    /// Random graph sweep (verify-bounds).
    pub graphs: usize,
    pub max_variables: usize,
    pub max_factors: usize,
    /// Voter counts for voting-mixing.
    pub n_min: usize,
    pub n_max: usize,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            seed: 1,
            n: 50,
            w: 0.5,
            prior_seed: 7,
            semantics: Semantics::ALL.to_vec(),
            chains: 20,
            schedule: (1..=10).map(|i| i * 10_000).collect(),
            nodes: 60,
            weights: vec![0.5, 0.7, 0.9],
            families: vec![TreeFamily::Path, mid_caterpillar(60), TreeFamily::Star],
            budget: 100_000,
            graphs: 200,
            max_variables: 6,
            max_factors: 5,
            n_min: 2,
            n_max: 5,
        }
    }

    /// Parses `key = value` lines; `#` starts a comment. `experiment` is
    /// required; other keys default.
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_pairs(parse_flat_config(text)?)
    }

    /// Builds a config from already-parsed pairs.
    pub fn from_pairs(mut pairs: BTreeMap<String, String>) -> Result<Self> {
        let kind = pairs
            .remove("experiment")
            .ok_or_else(|| Error::invalid("config is missing `experiment`"))?
            .parse()?;
        let mut config = ExperimentConfig::new(kind);
        for (k, v) in &pairs {
            config.set(k, v)?;
        }
        config.validate()?;
        Ok(config)
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn one<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::invalid(format!("`{key}`: cannot parse `{v}`")))
        }
        fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
            v.split(',').map(|x| one(key, x.trim())).collect()
        }
        match key {
            "experiment" => self.experiment = value.parse()?,
            "seed" => self.seed = one(key, value)?,
            "n" => self.n = one(key, value)?,
            "w" => self.w = one(key, value)?,
            "prior_seed" => self.prior_seed = one(key, value)?,
            "semantics" => {
                self.semantics = value.split(',').map(|s| s.trim().parse()).collect::<Result<_>>()?;
            }
            "chains" => self.chains = one(key, value)?,
            "schedule" => self.schedule = list(key, value)?,
            "nodes" => self.nodes = one(key, value)?,
            "weights" => self.weights = list(key, value)?,
            "families" => {
                self.families = value.split(',').map(|s| parse_family(s.trim())).collect::<Result<_>>()?;
            }
            "budget" => self.budget = one(key, value)?,
            "graphs" => self.graphs = one(key, value)?,
            "max_variables" => self.max_variables = one(key, value)?,
            "max_factors" => self.max_factors = one(key, value)?,
            "n_min" => self.n_min = one(key, value)?,
            "n_max" => self.n_max = one(key, value)?,
            other => return Err(Error::invalid(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::invalid(m.to_string()));
        if !self.w.is_finite() || self.weights.iter().any(|w| !w.is_finite()) {
            return fail("weights must be finite");
        }
        match self.experiment {
            ExperimentKind::VotingConvergence => {
                if self.n == 0 {
                    return fail("`n` must be at least 1");
                }
                if self.chains < 2 {
                    return fail("`chains` must be at least 2");
                }
                if self.schedule.is_empty() || self.schedule[0] == 0 || self.schedule.windows(2).any(|p| p[0] >= p[1]) {
                    return fail("`schedule` must be positive and strictly increasing");
                }
                if self.semantics.is_empty() {
                    return fail("`semantics` must name at least one semantics");
                }
            }
            ExperimentKind::IsingHw => {
                if self.nodes < 2 {
                    return fail("`nodes` must be at least 2");
                }
                if self.chains == 0 || self.budget == 0 {
                    return fail("`chains` and `budget` must be positive");
                }
                if self.families.is_empty() || self.weights.is_empty() {
                    return fail("`families` and `weights` must be nonempty");
                }
            }
            ExperimentKind::VerifyBounds => {
                if self.max_variables == 0 || self.max_variables > 10 {
                    return fail("`max_variables` must be in 1..=10");
                }
            }
            ExperimentKind::VotingMixing => {
                if self.n_min == 0 || self.n_min > self.n_max {
                    return fail("need 1 <= `n_min` <= `n_max`");
                }
            }
        }
        Ok(())
    }

    /// Canonical `key = value` form of the keys this experiment reads.
    pub fn to_text(&self) -> String {
        let join = |xs: Vec<String>| xs.join(",");
        let mut kv: Vec<(&str, String)> = vec![("experiment", self.experiment.name().into()), ("seed", self.seed.to_string())];
        match self.experiment {
            ExperimentKind::VotingConvergence => {
                kv.push(("n", self.n.to_string()));
                kv.push(("w", self.w.to_string()));
                kv.push(("prior_seed", self.prior_seed.to_string()));
                kv.push(("semantics", join(self.semantics.iter().map(|s| s.name().to_string()).collect())));
                kv.push(("chains", self.chains.to_string()));
                kv.push(("schedule", join(self.schedule.iter().map(u64::to_string).collect())));
            }
            ExperimentKind::IsingHw => {
                kv.push(("nodes", self.nodes.to_string()));
                kv.push(("weights", join(self.weights.iter().map(f64::to_string).collect())));
                kv.push(("families", join(self.families.iter().map(|f| f.label()).collect())));
                kv.push(("chains", self.chains.to_string()));
                kv.push(("budget", self.budget.to_string()));
            }
            ExperimentKind::VerifyBounds => {
                kv.push(("graphs", self.graphs.to_string()));
                kv.push(("max_variables", self.max_variables.to_string()));
                kv.push(("max_factors", self.max_factors.to_string()));
            }
            ExperimentKind::VotingMixing => {
                kv.push(("w", self.w.to_string()));
                kv.push(("semantics", join(self.semantics.iter().map(|s| s.name().to_string()).collect())));
                kv.push(("n_min", self.n_min.to_string()));
                kv.push(("n_max", self.n_max.to_string()));
            }
        }
        kv.into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    fn header(&self, notes: &[&str]) -> String {
        let mut out: String = self.to_text().lines().map(|l| format!("# {l}\n")).collect();
        for n in notes {
            writeln!(out, "# note: {n}").unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub semantics: Semantics,
    pub iterations: u64,
    pub mean: f64,
    pub variance: f64,
}

/// Across-chain variance of the running estimate of `P(Q = 1)` per semantics.
pub fn voting_convergence(config: &ExperimentConfig) -> Result<Vec<ConvergenceRow>> {
    let mut rows = Vec::new();
    for &sem in &config.semantics {
        let g = build_voting_model(config.n, sem, config.w, &VotingPriors::Uniform { seed: config.prior_seed });
        let q_true = g.variable(0).index_of(1).expect("Q takes the value 1");
        for p in marginal_variance_experiment(&g, 0, q_true, config.chains, &config.schedule, config.seed)? {
            rows.push(ConvergenceRow {
                semantics: sem,
                iterations: p.iterations,
                mean: p.mean,
                variance: p.variance,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsingRow {
    pub w: f64,
    pub family: TreeFamily,
    pub hierarchy_width: usize,
    pub query: usize,
    pub truth: f64,
    /// Mean over chains of the squared error of the query marginal.
    pub mse: f64,
}

/// Squared error of the query marginal after a fixed budget, per tree family.
pub fn ising_hw(config: &ExperimentConfig) -> Result<Vec<IsingRow>> {
    let mut rows = Vec::new();
    for &w in &config.weights {
        for &family in &config.families {
            let tree = build_tree_ising(config.nodes, family, w);
            let truth = exact_marginals_acyclic(&tree.graph)?[tree.query][1];
            let sampler = SamplerConfig {
                seed: config.seed,
                steps: config.budget,
                burn_in: 0,
                init: Init::Uniform,
            };
            let errors: Vec<f64> = (0..config.chains as u64)
                .into_par_iter()
                .map(|c| {
                    let trace = run_chain_on_stream(&tree.graph, &sampler, c)?;
                    Ok((trace.marginal(tree.query)[1] - truth).powi(2))
                })
                .collect::<Result<_>>()?;
            rows.push(IsingRow {
                w,
                family,
                hierarchy_width: tree.hierarchy_width,
                query: tree.query,
                truth,
                mse: errors.iter().sum::<f64>() / errors.len() as f64,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheckRow {
    pub graph: usize,
    pub check: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Random-graph shape used by the bound sweep.
pub fn sweep_spec(config: &ExperimentConfig) -> RandomGraphSpec {
    RandomGraphSpec {
        max_variables: config.max_variables,
        max_factors: config.max_factors,
        ..RandomGraphSpec::default()
    }
}

/// Runs every spectral lemma and mixing bound on one graph.
pub fn check_graph(index: usize, graph: &crate::fg::FactorGraph) -> Result<Vec<BoundCheckRow>> {
    let mut rows = Vec::new();
    let mut push = |check: String, value: f64, bound: f64, pass: bool| {
        rows.push(BoundCheckRow {
            graph: index,
            check,
            value,
            bound,
            pass,
        })
    };
    let p = transition_matrix(graph)?;
    let pi = crate::fg::exact_joint(graph)?.probabilities;
    let balance = p.detailed_balance_error(&pi);
    push("detailed_balance".into(), balance, 1e-10, balance <= 1e-10);
    let report = spectral_report(graph)?;
    let inputs = BoundInputs::of(graph)?;
    let gap_bound = inputs.gap_lower_bound();
    push("gap_lemma".into(), report.gamma, gap_bound, report.gamma >= gap_bound - LEMMA_TOLERANCE);
    for f in 0..graph.num_factors() {
        let r = check_factor_removal(graph, f)?;
        push(format!("factor_removal[{f}]"), r.gamma, r.bound, r.holds());
        let s = check_sandwich(graph, f)?;
        let tol = s.weight_range + LEMMA_TOLERANCE;
        push(format!("sandwich_pi[{f}]"), s.max_log_ratio_pi, s.weight_range, s.max_log_ratio_pi <= tol);
        push(format!("sandwich_kernel[{f}]"), s.max_log_ratio_kernel, s.weight_range, s.max_log_ratio_kernel <= tol);
    }
    let c = check_components(graph)?;
    push("component_gap".into(), c.gamma, c.bound, c.gamma >= c.bound - LEMMA_TOLERANCE);
    push("component_spectrum".into(), c.spectrum_mismatch, LEMMA_TOLERANCE, c.spectrum_mismatch <= LEMMA_TOLERANCE);
    let t_mix = exact_mixing_time(graph)?.t_mix as f64;
    let t2 = inputs.theorem2().ceil();
    push("theorem2".into(), t_mix, t2, t_mix <= t2);
    let relax = relaxation_bound(report.gamma, report.pi_min, 0.25)?.ceil();
    push("relaxation".into(), t_mix, relax, t_mix <= relax);
    Ok(rows)
}

/// Lemma and bound checks over random small graphs; graph `i` comes from
/// stream `(seed, i)`.
pub fn verify_bounds(config: &ExperimentConfig) -> Result<Vec<BoundCheckRow>> {
    let spec = sweep_spec(config);
    let per_graph: Vec<Vec<BoundCheckRow>> = (0..config.graphs)
        .into_par_iter()
        .map(|i| check_graph(i, &random_factor_graph(config.seed, i as u64, &spec)))
        .collect::<Result<_>>()?;
    Ok(per_graph.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixingRow {
    pub n: usize,
    pub semantics: Semantics,
    pub t_mix: u64,
}

/// Exact worst-case mixing time of the voting model with zero priors.
pub fn voting_mixing(config: &ExperimentConfig) -> Result<Vec<MixingRow>> {
    let mut rows = Vec::new();
    for n in config.n_min..=config.n_max {
        for &sem in &config.semantics {
            let g = build_voting_model(n, sem, config.w, &VotingPriors::Zero);
            rows.push(MixingRow {
                n,
                semantics: sem,
                t_mix: exact_mixing_time(&g)?.t_mix,
            });
        }
    }
    Ok(rows)
}

/// Runs the configured experiment and renders its CSV with the config header.
pub fn run_experiment(config: &ExperimentConfig) -> Result<String> {
    config.validate()?;
    let mut out;
    match config.experiment {
        ExperimentKind::VotingConvergence => {
            out = config.header(&["variance is across chains at each fixed budget; uniform random start; no burn-in"]);
            out.push_str("semantics,iterations,mean,variance\n");
            for r in voting_convergence(config)? {
                writeln!(out, "{},{},{},{}", r.semantics, r.iterations, r.mean, r.variance).unwrap();
            }
        }
        ExperimentKind::IsingHw => {
            out = config.header(&[
                "desk scale: tree Ising with fewer nodes than the original study",
                "query is the lowest-index maximum-degree node; mse is across chains",
            ]);
            out.push_str("w,family,hierarchy_width,query,truth,mse\n");
            for r in ising_hw(config)? {
                writeln!(out, "{},{},{},{},{},{}", r.w, r.family.label(), r.hierarchy_width, r.query, r.truth, r.mse).unwrap();
            }
        }
        ExperimentKind::VerifyBounds => {
            out = config.header(&[]);
            out.push_str("graph,check,value,bound,pass\n");
            for r in verify_bounds(config)? {
                writeln!(out, "{},{},{},{},{}", r.graph, r.check, r.value, r.bound, r.pass).unwrap();
            }
        }
        ExperimentKind::VotingMixing => {
            out = config.header(&["desk scale: exact worst-case-start mixing time at small n, zero priors"]);
            out.push_str("n,semantics,t_mix\n");
            for r in voting_mixing(config)? {
                writeln!(out, "{},{},{}", r.n, r.semantics, r.t_mix).unwrap();
            }
        }
    }
    Ok(out)
}
