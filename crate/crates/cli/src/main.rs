mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Format;

/// Coefficients, swap protocols and RWA checks for the shuttle transmon.
#[derive(Parser)]
#[command(name = "shuttle", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides `output.path`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format (overrides `output.format`).
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,

    /// Fock truncation (overrides `numeric.fock_dim`, or
    /// `validation.fock_dim` for `validate`).
    #[arg(long, global = true)]
    fock_dim: Option<usize>,

    /// Relative deviation accepted by `validate`.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate g1, g2, ω_q, ω_m and ω_p0 over a flux grid.
    Coefficients {
        /// `start:stop:points` or a comma-separated list, in radians.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
    /// Swap in, hold, swap out; compare with free qubit decay.
    Swap,
    /// Lab-frame versus rotating-wave single swap.
    Validate,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Domain(String),
    Integration(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Integration(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Domain(m) => write!(f, "domain error: {m}"),
            CliError::Integration(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<shuttle_core::Error> for CliError {
    fn from(e: shuttle_core::Error) -> Self {
        use shuttle_core::Error as E;
        match e {
            E::Domain(_) => CliError::Domain(e.to_string()),
            E::Integration { .. } | E::NotConverged { .. } => CliError::Integration(e.to_string()),
            E::InvalidArgument(_) | E::Unsupported(_) | E::Configuration(_) => CliError::Config(e.to_string()),
        }
    }
}

const TOLERANCE_EXCEEDED: u8 = 4;

fn run(cli: Cli) -> Result<u8, CliError> {
    let path = cli
        .config
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let mut cfg = config::load(&path)?;
    if let Some(out) = cli.out {
        cfg.output.path = out;
    }
    if let Some(format) = cli.format {
        cfg.output.format = format;
    }
    if let Some(tolerance) = cli.tolerance {
        cfg.validation.tolerance = tolerance;
    }
    if let Some(n) = cli.fock_dim {
        match cli.command {
            Command::Validate => cfg.validation.fock_dim = n,
            _ => cfg.numeric.fock_dim = n,
        }
    }
    let resolved = cfg.resolve()?;
    for warning in resolved.params.validate()? {
        eprintln!("warning: {warning}");
    }
    let out = resolved.config.output.path.clone();
    let format = resolved.config.output.format;

    match cli.command {
        Command::Coefficients { grid } => {
            let grid = match grid {
                Some(spec) => commands::parse_grid(&spec)?,
                None => {
                    let g = resolved.config.grid;
                    shuttle_core::circuit::linspace(g.phi_start_rad, g.phi_stop_rad, g.points)
                }
            };
            println!("{}", commands::coefficients(&resolved, &grid, &out, format)?);
            Ok(0)
        }
        Command::Swap => {
            println!("{}", commands::swap(&resolved, &out, format)?);
            Ok(0)
        }
        Command::Validate => {
            let outcome = commands::validate(&resolved, &out, format)?;
            println!("{}", outcome.message);
            if outcome.within {
                Ok(0)
            } else {
                eprintln!("validation tolerance exceeded");
                Ok(TOLERANCE_EXCEEDED)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("shuttle: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
