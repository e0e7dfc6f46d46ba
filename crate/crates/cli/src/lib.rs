//! Command-line front end for `bilinear-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod figures;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::dispatch;
pub use config::{CommandName, Figure, Options, RunConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(args_conflicts_with_subcommands = true)]
#[command(name = "bilinear", version, about = "Bilinear two-mode Gaussian Hamiltonians: simulation, rates, strategies and gate compilation")]
pub struct Cli {
    /// Read the command and its options from a JSON file instead.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Restricted singular values of a Hamiltonian.
    Rsv(Options),
    /// Whether one Hamiltonian simulates another at least as fast as real time.
    Simcheck(Options),
    /// Minimal interaction time to simulate the target for `--t`.
    Tmin(Options),
    /// Time-optimal simulation plan.
    Plan(Options),
    /// Symplectic evolution, optionally applied to a state.
    Evolve(Options),
    /// Entanglement and squeezing of a state.
    Measure(Options),
    /// Optimal entanglement and squeezing rates.
    Rates(Options),
    /// Run a strategy and export its trajectory.
    Run(Options),
    /// Squeezing and negativity bounds.
    Bounds(Options),
    /// Decompose a two-mode gate into primitives.
    Decompose(Options),
    /// Compile a gate into native interactions and local rotations.
    Compile(Options),
    /// Write the data of a figure to `<out>/<figure>.csv`.
    Figures(FigureArgs),
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub which: Option<Figure>,
    #[command(flatten)]
    pub options: Options,
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        if let Some(path) = self.config {
            return RunConfig::from_file(&path);
        }
        let (command, options) = match self.command {
            None => return Err(CliError::Validation("no command given; see --help".into())),
            Some(Command::Rsv(o)) => (CommandName::Rsv, o),
            Some(Command::Simcheck(o)) => (CommandName::Simcheck, o),
            Some(Command::Tmin(o)) => (CommandName::Tmin, o),
            Some(Command::Plan(o)) => (CommandName::Plan, o),
            Some(Command::Evolve(o)) => (CommandName::Evolve, o),
            Some(Command::Measure(o)) => (CommandName::Measure, o),
            Some(Command::Rates(o)) => (CommandName::Rates, o),
            Some(Command::Run(o)) => (CommandName::Run, o),
            Some(Command::Bounds(o)) => (CommandName::Bounds, o),
            Some(Command::Decompose(o)) => (CommandName::Decompose, o),
            Some(Command::Compile(o)) => (CommandName::Compile, o),
            Some(Command::Figures(FigureArgs { which, mut options })) => {
                if which.is_some() && options.figure.is_some() && which != options.figure {
                    return Err(CliError::Validation("conflicting figure selections".into()));
                }
                options.figure = options.figure.or(which);
                (CommandName::Figures, options)
            }
        };
        Ok(RunConfig { command, options })
    }
}
