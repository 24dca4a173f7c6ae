//! Driver for reproducible umbilic experiments: scenario files in, CSV,
//! JSON and SVG artifacts out.

pub mod commands;
pub mod output;
pub mod scenario;
pub mod svg;

use std::path::Path;

pub use scenario::Scenario;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad scenario, missing file, unwritable output.
    #[error("{0}")]
    Input(String),
    /// A numerical contract was not met.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn from_core(context: &str, e: umbilic_core::Error) -> Self {
        let msg = format!("{context}: {e}");
        if e.is_numerical() {
            CliError::Numerical(msg)
        } else {
            CliError::Input(msg)
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Index,
    Foliation,
    Umbilics,
    Scan,
    Poincare,
}

/// Runs one command on one scenario file.
pub fn run(command: Command, scenario: &Path, out: &Path) -> Result<(), CliError> {
    let sc = Scenario::load(scenario)?;
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", out.display())))?;
    match command {
        Command::Index => commands::cmd_index(&sc, out),
        Command::Foliation => commands::cmd_foliation(&sc, out),
        Command::Umbilics => commands::cmd_umbilics(&sc, out),
        Command::Scan => commands::cmd_scan(&sc, out),
        Command::Poincare => commands::cmd_poincare(&sc, out),
    }
}
