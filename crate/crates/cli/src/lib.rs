//! Command-line front end for Sieve-SGD experiments.

pub mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use sieve_core::simulation::{
    aggregate, fit_loglog_slope, in_pool, presets, read_csv, run_replications, write_outputs,
    ExperimentResult,
};
use sieve_core::SieveError;

pub use config::{parse_config, render, ConfigError};

/// Environment variable holding the default number of worker threads.
pub const WORKERS_ENV: &str = "SIEVE_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "sieve",
    version,
    about = "Run Sieve-SGD convergence experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment file and write `<run_id>.csv` and `<run_id>.json`.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replications: Option<usize>,
        /// Worker threads; defaults to all cores.
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
    },
    /// Fit the log-log slope of mean MSE against n from a run CSV.
    Slope {
        csv: PathBuf,
        #[arg(long = "n-min")]
        n_min: u64,
    },
    /// List the built-in presets.
    Presets,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<SieveError> for CliError {
    fn from(e: SieveError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub fn execute(cli: Cli, out: &mut impl Write) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            out: dir,
            seed,
            replications,
            workers,
        } => cmd_run(&config, &dir, seed, replications, workers, out),
        Command::Slope { csv, n_min } => cmd_slope(&csv, n_min, out),
        Command::Presets => cmd_presets(out),
    }
}

pub fn cmd_run(
    config_path: &Path,
    dir: &Path,
    seed: Option<u64>,
    replications: Option<usize>,
    workers: Option<usize>,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", config_path.display())))?;
    let mut config = parse_config(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", config_path.display())))?;
    if let Some(seed) = seed {
        config.run.seed = seed;
    }
    if let Some(r) = replications {
        config.run.replications = r;
    }
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let threads = match workers {
        Some(0) => {
            return Err(CliError::Usage(format!(
                "--workers ({WORKERS_ENV}) must be at least 1"
            )))
        }
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    log::info!("running {} with {threads} workers", config.run_id);
    let result = in_pool(threads, || run_replications(&config))??;
    let (csv, json) = write_outputs(dir, &result)?;
    summarize(&result, out)?;
    writeln!(out, "wrote {} and {}", csv.display(), json.display())?;
    if result.is_partial() {
        let errors: Vec<String> = result.failures.iter().map(|e| e.to_string()).collect();
        return Err(CliError::Runtime(format!(
            "{} of {} replications failed; outputs are partial: {}",
            result.failures.len(),
            config.run.replications,
            errors.join("; ")
        )));
    }
    Ok(())
}

fn summarize(result: &ExperimentResult, out: &mut impl Write) -> Result<(), CliError> {
    let rows = aggregate(&result.records);
    let Some(last) = rows.last() else {
        writeln!(out, "no records")?;
        return Ok(());
    };
    let n_min = (result.config.run.n_max as f64 / 10f64.powf(1.5)).round() as u64;
    let slope = match fit_loglog_slope(&result.records, n_min) {
        Ok(fit) => format!("{:.4}", fit.slope),
        Err(_) => "NA".to_string(),
    };
    write!(
        out,
        "n={} mean_mse={:.6e} slope={slope} n_min={n_min}",
        last.n, last.mse
    )?;
    if let Some(g) = last.regret {
        write!(out, " mean_regret={g:.6e}")?;
    }
    writeln!(out, " mse_method={}", result.mse_method.key())?;
    Ok(())
}

pub fn cmd_slope(csv: &Path, n_min: u64, out: &mut impl Write) -> Result<(), CliError> {
    let records =
        read_csv(csv).map_err(|e| CliError::Runtime(format!("{}: {e}", csv.display())))?;
    let fit = fit_loglog_slope(&records, n_min)?;
    writeln!(
        out,
        "slope={} intercept={} n_min={}",
        fit.slope, fit.intercept, fit.n_min
    )?;
    Ok(())
}

pub fn cmd_presets(out: &mut impl Write) -> Result<(), CliError> {
    for name in presets::PRESET_NAMES {
        let c = presets::preset(name).expect("listed preset");
        let p = &c.estimator;
        writeln!(out, "{name}")?;
        writeln!(out, "  {}", presets::describe(name).unwrap_or(""))?;
        writeln!(
            out,
            "  estimator={} alpha={} omega={} gamma0={} s={} family={} kernel={}",
            p.kind, p.alpha, p.omega, p.gamma0, p.s, p.family, p.kernel
        )?;
        writeln!(
            out,
            "  target={} x_dist={} noise={} dim={} n_max={} replications={} seed={}",
            c.data.target,
            c.data.x_dist,
            c.data.noise.key(),
            c.data.dim,
            c.run.n_max,
            c.run.replications,
            c.run.seed
        )?;
    }
    Ok(())
}
