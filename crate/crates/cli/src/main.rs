//! Config-driven command line for blackbody-friction calculations.
//!
//! Subcommands: `force` (single-point evaluation), `threshold`
//! (rotation-ratio acceleration threshold), `fig2` (normalized force curve
//! family), `sweep` (Cartesian parameter sweeps) and `evolve` (deceleration
//! trajectories). All output is CSV with `#` provenance comments.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical
//! non-convergence (flagged output still written), 4 solver abort (partial
//! trajectory written).

mod commands;
mod config;
mod output;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

/// Errors that terminate a command before useful output exists.
#[derive(Debug, Error)]
pub enum CliError {
    /// Configuration or argument problem (exit code 2).
    #[error("{0}")]
    Config(String),
    /// Parameter rejected by the core constructors (exit code 2).
    #[error(transparent)]
    Core(#[from] bbfriction::Error),
    /// Output or input I/O failure (exit code 1).
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Core(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "bbfriction",
    version,
    about = "Radiative drag, heating and deceleration of a small rotating particle in blackbody radiation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output CSV path (default: standard output).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override the quadrature relative tolerance from the config.
    #[arg(long, global = true)]
    quad_rtol: Option<f64>,

    /// Reserved for interface stability; every computation is deterministic
    /// and the value is ignored.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate F_x, the heating rate and both co-moving force routes at
    /// one configured state.
    Force {
        /// Run configuration file.
        #[arg(long)]
        config: PathBuf,
    },
    /// Closed-form rotation threshold u* at one (chi, theta), along with
    /// the chi window where acceleration is possible at all.
    Threshold {
        /// Reduced temperature chi = hbar*omega0 / 2 kB T2.
        #[arg(long)]
        chi: f64,
        /// Angle between rotation axis and velocity, radians.
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
    },
    /// Normalized co-moving force versus rotation ratio for a family of
    /// chi values at theta = 0 (quadratic and exact forms side by side).
    Fig2 {
        /// Upper end of the rotation-ratio grid.
        #[arg(long, default_value_t = 1.5)]
        u_max: f64,
        /// Number of grid points including both ends.
        #[arg(long, default_value_t = 151)]
        n_points: usize,
        /// Comma-separated chi values.
        #[arg(long = "chi", value_delimiter = ',', default_values_t = [1.5, 2.0, 2.5, 3.0])]
        chi_list: Vec<f64>,
    },
    /// Evaluate one quantity over a Cartesian grid of parameters.
    Sweep {
        /// Run configuration file providing the base point.
        #[arg(long)]
        config: PathBuf,
        /// Axis definition name:min:max:count[:linear|log]; repeat for more
        /// axes (sweepable: beta, omega, theta, T1, T2, chi, u).
        #[arg(long = "axis")]
        axis: Vec<String>,
        /// Quantity to tabulate: F_prime, F_x, Q_dot or f_normalized.
        #[arg(long)]
        quantity: String,
    },
    /// Integrate the deceleration equation over the configured time span.
    Evolve {
        /// Run configuration file (requires a `[solver]` section).
        #[arg(long)]
        config: PathBuf,
    },
}

fn open_sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(std::io::BufWriter::new(std::io::stdout())),
    })
}

fn read_config(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let sink = open_sink(&cli.out)?;
    match &cli.command {
        Command::Force { config } => {
            commands::cmd_force(&read_config(config)?, cli.quad_rtol, sink)
        }
        Command::Threshold { chi, theta } => commands::cmd_threshold(*chi, *theta, sink),
        Command::Fig2 {
            u_max,
            n_points,
            chi_list,
        } => commands::cmd_fig2(*u_max, *n_points, chi_list, sink),
        Command::Sweep {
            config,
            axis,
            quantity,
        } => commands::cmd_sweep(&read_config(config)?, axis, quantity, cli.quad_rtol, sink),
        Command::Evolve { config } => {
            commands::cmd_evolve(&read_config(config)?, cli.quad_rtol, sink)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
