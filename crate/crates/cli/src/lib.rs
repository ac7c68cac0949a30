//! File formats, reports and the `verify` suite behind the `solidsum` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod input;
pub mod verify;

pub use commands::{run, Report};
pub use config::{Cli, RunConfig};
pub use error::CliError;

/// Parses arguments, runs the command and writes its output; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let config = RunConfig::from_cli(cli)?;
    let report = run(&config)?;
    for line in &report.log {
        eprintln!("{line}");
    }
    let text = report.render(config.format);
    match &config.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    if report.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(report.failures))
    }
}
