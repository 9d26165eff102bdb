//! Command-line front end for the swarm precoding experiments.
//!
//! Exit status: 0 on success, 2 for configuration or I/O errors, 3 when a
//! numerical kernel fails (the message names the grid point and satellite).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vsat_precoding::experiments::{precoder_demo, run_distance_sweep, run_power_sweep, ExperimentConfig, KEYS};
use vsat_precoding::Error;

#[derive(Parser, Debug)]
#[command(name = "vsat-precoding", version, about = "Robust uplink precoding towards a LEO satellite swarm")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mean sum rate and capacity over the inter-satellite distance grid.
    DistanceSweep(RunArgs),
    /// Mean sum rate of every scheme over the transmit power grid.
    PowerSweep(RunArgs),
    /// One trial of each precoder with a per-satellite SLNR/SINR breakdown.
    PrecoderDemo(RunArgs),
    /// Parse and validate a configuration, then print it fully resolved.
    ValidateConfig(ConfigArgs),
}

#[derive(Args, Debug)]
struct ConfigArgs {
    /// Configuration file of `[section]` and `key = value` lines.
    #[arg(short, long)]
    config: Option<PathBuf>,

    /// Override one key, e.g. `--set error.model=gaussian`. Repeatable.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,

    /// Master seed (same as `run.seed`).
    #[arg(long)]
    seed: Option<u64>,

    /// Monte Carlo trials per grid point (same as `run.trials`).
    #[arg(long)]
    trials: Option<usize>,

    /// Output file; standard output when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,

    /// List every configuration key and exit.
    #[arg(long)]
    list_keys: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,

    /// Worker threads; 0 uses one per core. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Core(Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Core(e) if e.is_numerical() => write!(f, "numerical failure: {e}"),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

fn load(args: &ConfigArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    for o in &args.overrides {
        cfg.apply_override(o)?;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn list_keys() -> String {
    let width = KEYS.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    KEYS.iter().map(|(k, d)| format!("{k:width$}  {d}\n")).collect()
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config_args = match &cli.command {
        Command::DistanceSweep(a) | Command::PowerSweep(a) | Command::PrecoderDemo(a) => &a.config,
        Command::ValidateConfig(a) => a,
    };
    if config_args.list_keys {
        print!("{}", list_keys());
        return Ok(());
    }
    let cfg = load(config_args)?;
    match &cli.command {
        Command::DistanceSweep(a) => {
            let r = run_distance_sweep(&cfg, a.workers)?;
            emit(&a.config.out, &r.to_csv())
        }
        Command::PowerSweep(a) => {
            let r = run_power_sweep(&cfg, a.workers)?;
            emit(&a.config.out, &r.to_csv())
        }
        Command::PrecoderDemo(a) => emit(&a.config.out, &precoder_demo(&cfg)?.to_string()),
        Command::ValidateConfig(a) => emit(&a.out, &cfg.to_text()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
