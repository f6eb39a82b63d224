use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qes_cli::{exit_code, run_experiment, ExperimentConfig, ExperimentKind};
use qes_core::{Error, Result};

/// Two-laser heterodyne entropy-source simulator.
#[derive(Parser)]
#[command(name = "qes", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// CW–CW detuning sweep and locking window.
    LockingMap(RunArgs),
    /// Chirped beat traces and NZD times for several detunings.
    BeatTraces(RunArgs),
    /// Repeated sample batches and their pairwise KS distances.
    HistogramStability(RunArgs),
    /// Noise-subtracted autocorrelation report.
    Autocorr(RunArgs),
    /// Extracted random bits from simulated pulses.
    Generate(RunArgs),
    /// Parse and validate a configuration file without running it.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment configuration; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Pulse count of the experiment (per batch for histogram-stability).
    #[arg(long)]
    pulses: Option<usize>,
    /// Integration step in ns; the trace interval is kept.
    #[arg(long)]
    dt: Option<f64>,
}

fn resolve(kind: ExperimentKind, args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let cfg = ExperimentConfig::load(path)?;
            if cfg.experiment != kind {
                return Err(Error::Config(format!(
                    "{} configures experiment '{}', not '{kind}'",
                    path.display(),
                    cfg.experiment
                )));
            }
            cfg
        }
        None => ExperimentConfig::new(kind),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    if let Some(n) = args.pulses {
        cfg.set_pulses(n)?;
    }
    if let Some(dt) = args.dt {
        cfg.set_dt(dt)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<()> {
    let (kind, args) = match cli.command {
        Command::ValidateConfig { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            cfg.validate()?;
            println!("{}: valid {} configuration", config.display(), cfg.experiment);
            return Ok(());
        }
        Command::LockingMap(a) => (ExperimentKind::LockingMap, a),
        Command::BeatTraces(a) => (ExperimentKind::BeatTraces, a),
        Command::HistogramStability(a) => (ExperimentKind::HistogramStability, a),
        Command::Autocorr(a) => (ExperimentKind::Autocorr, a),
        Command::Generate(a) => (ExperimentKind::Generate, a),
    };
    let cfg = resolve(kind, &args)?;
    let outcome = run_experiment(&cfg)?;
    println!("{kind}: {}", outcome.headline());
    println!("artifacts in {}", cfg.out.display());
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
