use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use omnicorr_sim::config::{method_for, OmnibusConfig};
use omnicorr_sim::io::{embed_graphs, embeddings_csv, read_graph_file, sample_to_file};
use omnicorr_sim::{emit_report, ExperimentConfig, ExperimentKind, Format};

#[derive(Parser)]
#[command(name = "omnicorr", version, about = "Monte-Carlo checks of omnibus embedding limit theory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `experiment.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; defaults to `experiment.out`, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Empirical embedding covariances against the limit theory.
    CltCheck(Common),
    /// Theoretical and empirical induced correlations over block pairs.
    CorrSweep(Common),
    /// Averaged-embedding covariance factors and clustering error.
    EssSweep(Common),
    /// The weighted-omnibus correlation table.
    TableOnegen(Common),
    /// Clustering error of averaged embeddings.
    ClusterSweep(Common),
    /// Spectral-norm concentration of the omnibus matrix.
    BernsteinCheck(Common),
    /// Samples one graph collection from the configured model.
    Sample(Common),
    /// Embeds a graph collection with the configured method.
    Embed {
        #[command(flatten)]
        common: Common,
        /// Graph file written by `sample`.
        #[arg(long)]
        graphs: PathBuf,
        /// Embedding dimension; defaults to `experiment.d`.
        #[arg(long)]
        d: Option<usize>,
    },
}

const TABLE_DEFAULT: &str = r#"
[model]
atoms = [[1.0]]
weights = [1.0]
n = 2
m = 100
family = "independent"

[experiment]
kind = "table-onegen"
"#;

fn load(common: &Common, kind: Option<ExperimentKind>) -> Result<ExperimentConfig> {
    let mut cfg = match (&common.config, kind) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(ExperimentKind::TableOnegen)) => ExperimentConfig::from_toml(TABLE_DEFAULT)?,
        (None, _) => bail!("--config is required for this command"),
    };
    if let Some(kind) = kind {
        if cfg.experiment.kind != kind {
            bail!("config describes a {} experiment, not {kind}", cfg.experiment.kind);
        }
    }
    if let Some(seed) = common.seed {
        cfg.experiment.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_path(common: &Common, cfg: &ExperimentConfig) -> Option<PathBuf> {
    common.out.clone().or_else(|| cfg.experiment.out.as_ref().map(PathBuf::from))
}

fn write_stdout(text: &str) -> Result<()> {
    std::io::stdout().write_all(text.as_bytes()).context("writing to stdout")
}

fn run_experiment(common: &Common, kind: ExperimentKind) -> Result<bool> {
    let cfg = load(common, Some(kind))?;
    let report = omnicorr_sim::run(&cfg)?;
    match out_path(common, &cfg) {
        Some(path) => emit_report(&report, &path, common.format)?,
        None => match common.format {
            Format::Csv => write_stdout(&report.to_csv()?)?,
            Format::Json => write_stdout(&report.to_json())?,
        },
    }
    eprint!("{}", report.check_lines());
    Ok(report.all_passed())
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => write_stdout(text),
    }
}

fn execute(command: Command) -> Result<bool> {
    let common = match &command {
        Command::CltCheck(c)
        | Command::CorrSweep(c)
        | Command::EssSweep(c)
        | Command::TableOnegen(c)
        | Command::ClusterSweep(c)
        | Command::BernsteinCheck(c)
        | Command::Sample(c) => c.clone(),
        Command::Embed { common, .. } => common.clone(),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads)
        .build_global()
        .context("starting worker threads")?;
    match command {
        Command::CltCheck(c) => run_experiment(&c, ExperimentKind::CltCheck),
        Command::CorrSweep(c) => run_experiment(&c, ExperimentKind::CorrSweep),
        Command::EssSweep(c) => run_experiment(&c, ExperimentKind::EssSweep),
        Command::TableOnegen(c) => run_experiment(&c, ExperimentKind::TableOnegen),
        Command::ClusterSweep(c) => run_experiment(&c, ExperimentKind::ClusterSweep),
        Command::BernsteinCheck(c) => run_experiment(&c, ExperimentKind::BernsteinCheck),
        Command::Sample(c) => {
            let cfg = load(&c, None)?;
            let Some(out) = out_path(&c, &cfg) else {
                bail!("sample needs --out");
            };
            sample_to_file(&cfg, &out)?;
            Ok(true)
        }
        Command::Embed { common, graphs, d } => {
            let cfg = load(&common, None)?;
            let adjacency = read_graph_file(&graphs)?;
            let m = adjacency.len();
            let omnibus: &OmnibusConfig = &cfg.omnibus;
            let method = method_for(omnibus, m)?;
            let d = d.or(cfg.experiment.d).context("embedding dimension: pass --d or set experiment.d")?;
            let blocks = embed_graphs(&method, &adjacency, d)?;
            write_text(out_path(&common, &cfg).as_deref(), &embeddings_csv(&blocks)?)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
