//! `critmet`: data files for critical-metrology scans of the quantum Rabi model.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Format, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "critmet", version, about = "Critical quantum metrology scans of the quantum Rabi model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overridden by CRITMET_OUT).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for grid scans.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Signal-to-noise ratio and homodyne FI/QFI against g.
    Fig1,
    /// Exact and effective-model QFI against g.
    Qfi,
    /// Homodyne Fisher information and quadrature distribution.
    Homodyne,
    /// Optimal adiabatic sweep schedule and its integration.
    Sweep,
    /// Driven-dissipative steady states and relaxation.
    Dissipative,
    /// Protocol comparison, scaling fits and crossover times.
    Benchmark,
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::from(e).context(&path.display().to_string()))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    let out = std::env::var_os("CRITMET_OUT")
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or(cli.out)
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    cfg.out = Some(out.clone());

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::new("config", "--threads must be positive"));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::new("config", e.to_string()))?;
    pool.install(|| match cli.command {
        Command::Fig1 => commands::fig1(&mut cfg, &out),
        Command::Qfi => commands::qfi(&mut cfg, &out),
        Command::Homodyne => commands::homodyne(&mut cfg, &out),
        Command::Sweep => commands::sweep(&mut cfg, &out),
        Command::Dissipative => commands::dissipative(&mut cfg, &out),
        Command::Benchmark => commands::benchmark(&mut cfg, &out),
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}
