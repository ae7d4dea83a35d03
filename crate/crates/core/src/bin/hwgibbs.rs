use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use hwgibbs::cli::{coupling_csv, header, lemma_report, parse_flat_config, sample_csv, spectral_csv};
use hwgibbs::experiment::{run_experiment, ExperimentConfig};
use hwgibbs::fg::{parse_factor_graph, write_factor_graph, FactorGraph, Semantics};
use hwgibbs::templates::{ground, parse_dataset, parse_template};
use hwgibbs::width::{hw_at_most_k, width_report};
use hwgibbs::Error;

/// Gibbs sampling, hierarchy width and exact mixing analysis for factor graphs.
#[derive(Parser)]
#[command(name = "hwgibbs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hierarchy width, structural bounds and a certificate.
    Width(WidthArgs),
    /// Running marginal estimates, or coupling times with --couple.
    Sample(SampleArgs),
    /// Spectral gap and mixing-time bounds.
    Spectral(SpectralArgs),
    /// Ground a template on a dataset into a factor-graph file.
    Ground(GroundArgs),
    /// Run an experiment described by --config.
    Experiment(Common),
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` file supplying any option not given on the command line.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WidthArgs {
    file: Option<PathBuf>,
    /// Also decide whether the width is at most k.
    #[arg(long)]
    k: Option<usize>,
    /// Write the hierarchy decomposition here.
    #[arg(long)]
    certificate: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SampleArgs {
    file: Option<PathBuf>,
    #[arg(long)]
    steps: Option<u64>,
    /// Chains, or coupled replicates with --couple.
    #[arg(long)]
    chains: Option<usize>,
    /// Report only this variable (name or index).
    #[arg(long)]
    query: Option<String>,
    #[arg(long)]
    couple: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SpectralArgs {
    file: Option<PathBuf>,
    /// Compute the exact worst-case mixing time.
    #[arg(long)]
    mixing: bool,
    /// Print every lemma check; exits 1 if one fails.
    #[arg(long)]
    verify_lemmas: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct GroundArgs {
    schema: Option<PathBuf>,
    data: Option<PathBuf>,
    #[arg(long)]
    semantics: Option<Semantics>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("{0}")]
    Usage(String),
}

type Result<T> = std::result::Result<T, CliError>;

/// Command-line values layered over a config file.
struct Settings {
    file: BTreeMap<String, String>,
}

impl Settings {
    fn load(common: &Common, allowed: &[&str]) -> Result<Self> {
        let file = match &common.config {
            Some(p) => parse_flat_config(&read(p)?)?,
            None => BTreeMap::new(),
        };
        if let Some(k) = file.keys().find(|k| !allowed.contains(&k.as_str()) && !["seed", "out"].contains(&k.as_str())) {
            return Err(CliError::Usage(format!("unknown config key `{k}`")));
        }
        Ok(Settings { file })
    }

    fn get<T: FromStr>(&self, key: &str, cli: Option<T>) -> Result<Option<T>> {
        if cli.is_some() {
            return Ok(cli);
        }
        self.file
            .get(key)
            .map(|v| v.parse().map_err(|_| CliError::Usage(format!("`{key}`: cannot parse `{v}`"))))
            .transpose()
    }

    fn require<T: FromStr>(&self, key: &str, cli: Option<T>) -> Result<T> {
        self.get(key, cli)?.ok_or_else(|| CliError::Usage(format!("missing `{key}`")))
    }

    fn flag(&self, key: &str, cli: bool) -> Result<bool> {
        Ok(cli || self.get::<bool>(key, None)?.unwrap_or(false))
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(p.to_path_buf(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_graph(path: &Path) -> Result<FactorGraph> {
    Ok(parse_factor_graph(&read(path)?)?)
}

fn width(args: WidthArgs) -> Result<()> {
    let s = Settings::load(&args.common, &["file", "k", "certificate"])?;
    let file: PathBuf = s.require("file", args.file)?;
    let out: Option<PathBuf> = s.get("out", args.common.out)?;
    let certificate: Option<PathBuf> = s.get("certificate", args.certificate)?;
    let graph = load_graph(&file)?;
    let report = width_report(&graph)?;
    let mut text = report.summary();
    if let Some(k) = s.get::<usize>("k", args.k)? {
        text.push_str(&format!("hw_at_most_{k} {}\n", hw_at_most_k(&graph, k)));
    }
    write(out.as_deref(), &text)?;
    if let Some(p) = certificate {
        write(Some(&p), &report.certificate.to_certificate_text(&graph))?;
    }
    Ok(())
}

fn sample(args: SampleArgs) -> Result<()> {
    let s = Settings::load(&args.common, &["file", "steps", "chains", "query", "couple"])?;
    let file: PathBuf = s.require("file", args.file)?;
    let steps: u64 = s.require("steps", args.steps)?;
    let chains: usize = s.get("chains", args.chains)?.unwrap_or(1);
    let seed: u64 = s.get("seed", args.common.seed)?.unwrap_or(1);
    let query: Option<String> = s.get("query", args.query)?;
    let couple = s.flag("couple", args.couple)?;
    let out: Option<PathBuf> = s.get("out", args.common.out)?;
    let graph = load_graph(&file)?;
    let query = query
        .map(|q| {
            graph
                .variable_id(&q)
                .or_else(|| q.parse().ok().filter(|&i: &usize| i < graph.num_variables()))
                .ok_or_else(|| CliError::Usage(format!("unknown query variable `{q}`")))
        })
        .transpose()?;
    let mut meta = vec![
        ("command", "sample".to_string()),
        ("file", file.display().to_string()),
        ("steps", steps.to_string()),
        ("chains", chains.to_string()),
        ("seed", seed.to_string()),
        ("couple", couple.to_string()),
    ];
    if let Some(q) = query {
        meta.push(("query", graph.variable(q).name.clone()));
    }
    let body = if couple {
        coupling_csv(&graph, steps, chains, seed)?
    } else {
        sample_csv(&graph, steps, chains, seed, query)?
    };
    write(out.as_deref(), &(header(&meta) + &body))
}

fn spectral(args: SpectralArgs) -> Result<()> {
    let s = Settings::load(&args.common, &["file", "mixing", "verify_lemmas"])?;
    let file: PathBuf = s.require("file", args.file)?;
    let mixing = s.flag("mixing", args.mixing)?;
    let verify = s.flag("verify_lemmas", args.verify_lemmas)?;
    let seed: Option<u64> = s.get("seed", args.common.seed)?;
    let out: Option<PathBuf> = s.get("out", args.common.out)?;
    let graph = load_graph(&file)?;
    let mut meta = vec![
        ("command", "spectral".to_string()),
        ("file", file.display().to_string()),
        ("mixing", mixing.to_string()),
    ];
    if let Some(seed) = seed {
        meta.push(("seed", seed.to_string()));
    }
    write(out.as_deref(), &(header(&meta) + &spectral_csv(&graph, mixing)?))?;
    if verify {
        let (text, ok) = lemma_report(&graph)?;
        eprint!("{text}");
        if !ok {
            return Err(CliError::Usage("a lemma check failed".into()));
        }
    }
    Ok(())
}

fn ground_cmd(args: GroundArgs) -> Result<()> {
    let s = Settings::load(&args.common, &["schema", "data", "semantics"])?;
    let schema_path: PathBuf = s.require("schema", args.schema)?;
    let data_path: PathBuf = s.require("data", args.data)?;
    let semantics: Semantics = s.get("semantics", args.semantics)?.unwrap_or(Semantics::Linear);
    let out: Option<PathBuf> = s.get("out", args.common.out)?;
    let schema = parse_template(&read(&schema_path)?)?;
    let data = parse_dataset(&read(&data_path)?)?;
    let grounded = ground(&schema, &data, semantics)?;
    let meta = [
        ("command", "ground".to_string()),
        ("schema", schema_path.display().to_string()),
        ("data", data_path.display().to_string()),
        ("semantics", semantics.name().to_string()),
    ];
    write(out.as_deref(), &(header(&meta) + &write_factor_graph(&grounded.graph)))
}

fn experiment(common: Common) -> Result<()> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("`experiment` needs --config".into()))?;
    let mut pairs = parse_flat_config(&read(path)?)?;
    let file_out = pairs.remove("out").map(PathBuf::from);
    if let Some(seed) = common.seed {
        pairs.insert("seed".into(), seed.to_string());
    }
    let config = ExperimentConfig::from_pairs(pairs)?;
    write(common.out.or(file_out).as_deref(), &run_experiment(&config)?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Width(a) => width(a),
        Command::Sample(a) => sample(a),
        Command::Spectral(a) => spectral(a),
        Command::Ground(a) => ground_cmd(a),
        Command::Experiment(a) => experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hwgibbs: {e}");
            match e {
                CliError::Lib(Error::ResourceLimit(_)) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
