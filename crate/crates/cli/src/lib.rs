//! Command-line front end: argument parsing, dispatch and report output.

pub mod args;
pub mod commands;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use args::{Cli, Command, Format, Output};
use commands::{Failure, Outcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Runs the CLI on `argv` (including the program name) and returns the exit
/// code. Reports go to `out` unless `--out` is given; diagnostics go to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let (result, output) = dispatch(&cli.command);
    match result {
        Ok(Outcome { report, passed }) => {
            let text = match output.format {
                Format::Json => report.to_canonical_json(),
                Format::Csv => match report.to_csv() {
                    Ok(t) => t,
                    Err(e) => {
                        let _ = writeln!(err, "error: {e}");
                        return EXIT_INVALID;
                    }
                },
            };
            if let Err(e) = emit(&text, output, out) {
                let _ = writeln!(err, "error: {e}");
                return EXIT_USAGE;
            }
            if passed {
                EXIT_OK
            } else {
                let _ = writeln!(err, "validation failed");
                EXIT_INVALID
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "usage error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INVALID
        }
    }
}

fn dispatch(command: &Command) -> (Result<Outcome, Failure>, &Output) {
    match command {
        Command::Validate(a) => (commands::validate(a), &a.output),
        Command::Build(a) => (commands::build(a), &a.output),
        Command::States(a) => (commands::states(a), &a.output),
        Command::Born(a) => (commands::born(a), &a.output),
        Command::Simulate(a) => (commands::simulate(a), &a.output),
        Command::GleasonCheck(a) => (commands::gleason_check(a), &a.output),
        Command::Bell(a) => (commands::bell(a), &a.output),
        Command::Reduce(a) => (commands::reduce(a), &a.output),
        Command::Gcs(a) => (commands::gcs(a), &a.output),
    }
}

fn emit(text: &str, output: &Output, out: &mut dyn Write) -> std::io::Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text),
        None => out.write_all(text.as_bytes()),
    }
}
