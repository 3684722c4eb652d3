//! `kerrsim`: configuration-driven runs of the Kerr oscillator solvers.
//!
//! Every subcommand writes CSV tables with a `#` header block plus a
//! matplotlib stub into the output directory. Worker threads are taken
//! from `KERRSIM_THREADS` (default: all cores).

mod commands;
mod config;
mod error;
mod output;
mod selfcheck;

use clap::{Parser, Subcommand};
use config::{Preset, RunConfig, Solver};
use error::{CliError, Result};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "kerrsim", version, about = "Driven dissipative Kerr oscillator simulations")]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for stochastic trajectories.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Pinned chain/truncation settings.
    #[arg(long, global = true, value_enum)]
    preset: Option<Preset>,
    #[arg(long, global = true, value_enum)]
    solver: Option<Solver>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Steady-state amplitude, photon number and g²(0) over the sweep.
    Steady,
    /// Time traces of ⟨a⟩, n and g²(0) from the configured initial state.
    Dynamics,
    /// Wigner maps of the steady (or final) state for each sweep point.
    Wigner,
    /// Quadrature fluctuation spectra.
    Spectrum,
    /// Invariant checks over all modules.
    Selfcheck {
        /// Reference table to check instead of the built-in one.
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(o) = &cli.out {
        cfg.output_dir = o.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(p) = cli.preset {
        cfg.preset = p;
    }
    if let Some(s) = cli.solver {
        cfg.solver = s;
    }
    cfg.apply_preset();
    cfg.validate()?;
    Ok(cfg)
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("KERRSIM_THREADS") {
        let n: usize = v.parse().map_err(|_| CliError::Config(format!("KERRSIM_THREADS={v:?} is not a thread count")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<()> {
    if let Command::Selfcheck { fixture } = &cli.command {
        return selfcheck::selfcheck(fixture.as_deref());
    }
    let cfg = resolve(&cli)?;
    let mut out = output::OutputDir::create(&cfg.output_dir)?;
    let pool = thread_pool()?;
    pool.install(|| match cli.command {
        Command::Steady => commands::steady(&cfg, &mut out),
        Command::Dynamics => commands::dynamics(&cfg, &mut out),
        Command::Wigner => commands::wigner(&cfg, &mut out),
        Command::Spectrum => commands::spectrum(&cfg, &mut out),
        Command::Selfcheck { .. } => unreachable!(),
    })?;
    for p in &out.written {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = serde_json::json!({ "error": e.category(), "message": e.to_string() });
            eprintln!("{msg}");
            ExitCode::from(e.exit_code())
        }
    }
}
