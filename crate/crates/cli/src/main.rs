//! `spinsurf`: geometry reports, spectra, gap scans and FW checks for Dirac
//! fermions confined to curved surfaces.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spinsurf::Error;

use crate::config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("geometry error: {0}")]
    Geometry(Error),
    #[error("solver error: {0}")]
    Solver(Error),
    #[error("acceptance check failed: {0}")]
    Acceptance(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn solver(e: Error) -> Self {
        match e {
            Error::DegenerateChart { .. } | Error::OutsideTube { .. } => CliError::Geometry(e),
            _ => CliError::Solver(e),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Geometry(_) => 3,
            CliError::Solver(_) => 4,
            CliError::Acceptance(_) => 5,
            CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DegenerateChart { .. } | Error::OutsideTube { .. } => CliError::Geometry(e),
            Error::NonHermitianInput { .. } | Error::ConvergenceFailure { .. } => CliError::Solver(e),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "spinsurf", version, about = "Effective Dirac Hamiltonians on curved surfaces")]
struct Cli {
    /// TOML config with [surface], [grid], [physics], [solve], [fw], [geometry] and [output] sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides SPINSURF_OUT and the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized sampling and solver start vectors.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Per-node geometry table and metric expansion identity report.
    Geometry,
    /// Lowest eigenpairs of the effective Hamiltonian in each β block.
    Spectrum,
    /// Zeeman-like coefficient, spin connection and doublet splitting per θ row.
    GapScan,
    /// Odd residual after each FW step across a list of masses.
    FwVerify,
    /// Harmonic versus square-well spectra and the normal-problem levels.
    CompareConfinement,
}

fn run(cli: &Cli) -> Result<commands::Report, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.resolve(cli.out.clone(), std::env::var("SPINSURF_OUT").ok(), cli.seed);
    cfg.validate()?;
    match cli.command {
        Command::Geometry => commands::geometry(&cfg),
        Command::Spectrum => commands::spectrum(&cfg),
        Command::GapScan => commands::gap_scan_cmd(&cfg),
        Command::FwVerify => commands::fw_verify(&cfg),
        Command::CompareConfinement => commands::compare_confinement(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            match report.failure {
                Some(msg) => {
                    let e = CliError::Acceptance(msg);
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code())
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
