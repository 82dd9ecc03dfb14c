//! `relbell` — deterministic scenario runner for CHSH statistics of
//! relativistic spin-1/2 singlet pairs.
//!
//! Each subcommand reads an optional TOML config, layers flag overrides on
//! top, runs the scenario, and writes a CSV whose header carries a hash of
//! the effective configuration. Identical configs produce byte-identical
//! output. Exit codes: 0 success, 2 configuration or usage error, 3 singular
//! numerical configuration, 4 I/O error.

mod config;
mod error;
mod output;
mod scenarios;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Mode, Overrides, Scenario, ScenarioConfig};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "relbell",
    version,
    about = "CHSH Bell-test statistics for relativistic spin-1/2 singlet pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pointwise CHSH value S over a grid of particle-b momentum directions
    SphereSweep(RunArgs),
    /// Cone-averaged S versus acceptance angle, one curve per particle speed
    ConeSweep(RunArgs),
    /// Cone-averaged S versus acceptance angle, one curve per observer boost
    BoostedConeSweep(RunArgs),
    /// Search the particle-b field directions that maximize S
    Optimize(RunArgs),
    /// Solve lab-frame fields that realize target rest-frame axes
    Compensate(RunArgs),
}

impl Command {
    fn scenario(&self) -> Scenario {
        match self {
            Command::SphereSweep(_) => Scenario::SphereSweep,
            Command::ConeSweep(_) => Scenario::ConeSweep,
            Command::BoostedConeSweep(_) => Scenario::BoostedConeSweep,
            Command::Optimize(_) => Scenario::Optimize,
            Command::Compensate(_) => Scenario::Compensate,
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::SphereSweep(a)
            | Command::ConeSweep(a)
            | Command::BoostedConeSweep(a)
            | Command::Optimize(a)
            | Command::Compensate(a) => a,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file; every field is optional and defaults are documented
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Particle-b speed (fraction of c, in (0, 1)); for cone-sweep this
    /// replaces the whole speed list, for compensate it rescales the
    /// velocity magnitude
    #[arg(long, value_name = "SPEED")]
    speed_b: Option<f64>,

    /// Observer boost along +z (fraction of c, in [0, 1)); for
    /// boosted-cone-sweep this replaces the whole boost list
    #[arg(long, value_name = "BETA")]
    beta: Option<f64>,

    /// Truncate the acceptance-angle grid at this many degrees; for
    /// optimize this sets the cone angle itself (0 = pointwise)
    #[arg(long, value_name = "DEG")]
    theta_prime_max: Option<f64>,

    /// Point count for the polar-like grid, keeping its span (sphere-sweep:
    /// theta; cone sweeps: theta-prime)
    #[arg(long, value_name = "N")]
    grid_theta: Option<usize>,

    /// Point count for the azimuthal sweep grid, keeping its span
    #[arg(long, value_name = "N")]
    grid_phi: Option<usize>,

    /// Polar quadrature nodes for cone averages
    #[arg(long, value_name = "N")]
    quad_theta: Option<usize>,

    /// Azimuthal quadrature nodes for cone averages
    #[arg(long, value_name = "N")]
    quad_phi: Option<usize>,

    /// Cone-average flavor used where a single objective is needed
    #[arg(long, value_enum, value_name = "MODE")]
    mode: Option<Mode>,

    /// Output file path (default: stdout)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            speed_b: self.speed_b,
            beta: self.beta,
            theta_prime_max: self.theta_prime_max,
            grid_theta: self.grid_theta,
            grid_phi: self.grid_phi,
            quad_theta: self.quad_theta,
            quad_phi: self.quad_phi,
            mode: self.mode,
            out: self.out.as_ref().map(|p| p.display().to_string()),
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let scenario = cli.command.scenario();
    let args = cli.command.args();

    let config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::io(path.display().to_string(), e))?;
            ScenarioConfig::from_toml(&text)?
        }
        None => ScenarioConfig::default(),
    };
    let config = config.finalize(scenario, &args.overrides())?;

    let doc = scenarios::run(scenario, &config)?;
    output::write(&config, &doc)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
