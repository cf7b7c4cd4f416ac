//! Command-line front end for `steenrod-core`: expression parsing, model
//! files, text and JSON output, and the built-in invariant suites.

pub mod args;
pub mod check;
pub mod commands;
pub mod error;
pub mod expr;
pub mod model;

use std::ffi::OsString;

use clap::Parser;

pub use error::CliError;

/// Captured result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    if let args::Command::Check = cli.command {
        let (lines, ok) = check::run_suites(&check::all());
        let mut stdout = lines.join("\n");
        stdout.push('\n');
        return Outcome { code: if ok { 0 } else { 1 }, stdout, stderr: String::new() };
    }
    match commands::execute(&cli.command) {
        Ok(report) => {
            let stdout = if commands::wants_json(&cli.command) { report.to_json() } else { report.to_text() };
            let stderr = report.notes.iter().map(|n| format!("{n}\n")).collect();
            Outcome { code: 0, stdout, stderr }
        }
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}
