//! `mkg`: runs, identity checks and estimate probes.

mod config;
mod error;
mod identities;
mod info;
mod output;
mod probe;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use config::{parse, preset_config, set_path, RunConfig};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "mkg", version, about = "Maxwell-Klein-Gordon in Lorenz gauge on the torus")]
struct Cli {
    /// Log verbosity (-v info, -vv debug); RUST_LOG takes precedence.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build data, evolve and write diagnostics and snapshots.
    Run(RunArgs),
    /// Check the algebraic identities on random data.
    CheckIdentities {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 32)]
        size: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Test hook: reverse the Riesz transforms inside the null-form decomposition.
        #[arg(long, hide = true)]
        flip_riesz_sign: bool,
    },
    /// Probe an estimate over random ensembles and resolutions.
    Probe(probe::ProbeArgs),
    /// Print grid facts and the exponent admissibility report.
    Info {
        /// Take grid and exponents from a run configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// JSON run configuration.
    config: Option<PathBuf>,
    /// Start from a named configuration (zero, smalldata-n2) instead of a file.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    size: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "t-final", short = 'T')]
    t_final: Option<f64>,
    /// gautschi or rk4.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    mass: Option<f64>,
    /// Seed of random data.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    cadence: Option<usize>,
    #[arg(long)]
    snapshot_every: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    r: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Reject exponents that violate the well-posedness hypotheses instead of warning.
    #[arg(long)]
    strict_exponents: bool,
}

fn read_json(path: &PathBuf) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))
}

fn num(path: &str, x: f64) -> Result<Value, CliError> {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .ok_or_else(|| CliError::config(path, format!("{x} is not finite")))
}

fn resolve_run(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut v = match (&args.preset, &args.config) {
        (Some(_), Some(_)) => return Err(CliError::config("preset", "give either a config file or --preset".into())),
        (Some(p), None) => preset_config(p)?,
        (None, Some(path)) => read_json(path)?,
        (None, None) => return Err(CliError::config("config", "give a config file or --preset".into())),
    };
    if !v.is_object() {
        return Err(CliError::config("<root>", "expected a JSON object".into()));
    }
    if let Some(x) = args.dim {
        set_path(&mut v, "grid.n", json!(x))?;
    }
    if let Some(x) = args.size {
        set_path(&mut v, "grid.N", json!(x))?;
    }
    for (path, val) in [
        ("dt", args.dt),
        ("T", args.t_final),
        ("mass", args.mass),
        ("exponents.s", args.s),
        ("exponents.r", args.r),
        ("exponents.epsilon", args.epsilon),
    ] {
        if let Some(x) = val {
            set_path(&mut v, path, num(path, x)?)?;
        }
    }
    if let Some(x) = &args.scheme {
        set_path(&mut v, "scheme", json!(x))?;
    }
    if let Some(x) = args.seed {
        set_path(&mut v, "data.random.seed", json!(x))?;
    }
    if let Some(x) = args.cadence {
        set_path(&mut v, "cadence", json!(x))?;
    }
    if let Some(x) = args.snapshot_every {
        set_path(&mut v, "snapshot_every", json!(x))?;
    }
    if let Some(x) = &args.out {
        set_path(&mut v, "output_dir", json!(x))?;
    }
    parse(v)
}

fn info_exponents(
    config: &Option<PathBuf>,
    dim: Option<usize>,
    size: Option<usize>,
    s: Option<f64>,
    r: Option<f64>,
    epsilon: Option<f64>,
) -> Result<(usize, usize, mkg_core::SobolevExponents), CliError> {
    let base = match config {
        Some(path) => {
            let cfg: RunConfig = parse(read_json(path)?)?;
            Some(cfg)
        }
        None => None,
    };
    let dim = dim.or(base.as_ref().map(|c| c.grid.n)).ok_or_else(|| CliError::config("grid.n", "give --dim or --config".into()))?;
    let size = size.or(base.as_ref().map(|c| c.grid.size)).unwrap_or(32);
    let mut e: mkg_core::SobolevExponents = base.map(|c| c.exponents.into()).unwrap_or_default();
    e.s = s.unwrap_or(e.s);
    e.r = r.unwrap_or(e.r);
    e.epsilon = epsilon.unwrap_or(e.epsilon);
    Ok((dim, size, e))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = output::requested_threads() {
        log::info!("MKG_THREADS={t}; computations run on one thread");
    }
    match cli.command {
        Command::Run(args) => {
            let cfg = resolve_run(&args)?;
            run::cmd_run(&cfg, args.strict_exponents)
        }
        Command::CheckIdentities { dim, size, seed, flip_riesz_sign } => {
            identities::cmd_check_identities(dim, size, seed, flip_riesz_sign)
        }
        Command::Probe(args) => probe::cmd_probe(&args),
        Command::Info { config, dim, size, s, r, epsilon } => {
            let (dim, size, e) = info_exponents(&config, dim, size, s, r, epsilon)?;
            info::cmd_info(dim, size, e)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { error::EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
