//! Command implementations behind the `symcap` binary.

pub mod args;
pub mod commands;
pub mod output;
pub mod report;

pub use args::{Cli, Command};
pub use output::{CliError, Outcome};

/// Runs a parsed command line and returns the outcome to emit.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Capacity(a) => commands::capacity(a, g),
        Command::Billiard(a) => commands::billiard(a, g),
        Command::VerifyMap(a) => commands::verify_map(a, g),
        Command::Volume(a) => commands::volume(a, g),
        Command::Cylinder(a) => commands::cylinder(a, g),
        Command::Report(a) => report::report(a, g),
    }
}
