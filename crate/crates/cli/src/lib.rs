//! Experiment harness and command-line interface for `ffdioph-core`.

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub mod cf;
pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

pub use config::{Cli, Command, Config, ExperimentKind, Format};
pub use error::{CliError, CliResult};
pub use report::Report;

/// Parses `experiment ...` arguments (without the program name) into a config.
pub fn parse_experiment<I, T>(args: I) -> CliResult<Config>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv = std::iter::once(OsString::from("ffdioph")).chain(args.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    match cli.command {
        Command::Experiment(a) => Config::from_args(&a),
        Command::Cf(_) => Err(CliError::Usage("expected an experiment".into())),
    }
}

/// Runs an experiment configuration.
pub fn run_experiment(cfg: &Config) -> CliResult<Report> {
    experiments::run(cfg)
}

/// Full command-line entry point; returns the process exit code.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: &Command, out: &mut dyn Write) -> CliResult<i32> {
    let io = |e: std::io::Error| CliError::Io { path: "<stdout>".into(), source: e };
    match command {
        Command::Cf(args) => {
            out.write_all(cf::run(args)?.as_bytes()).map_err(io)?;
            Ok(0)
        }
        Command::Experiment(args) => {
            let cfg = Config::from_args(args)?;
            let report = run_experiment(&cfg)?;
            let text = report.render(cfg.format)?;
            match &cfg.output {
                Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io { path: path.clone(), source: e })?,
                None => out.write_all(text.as_bytes()).map_err(io)?,
            }
            Ok(if cfg.check && !report.passed() { 3 } else { 0 })
        }
    }
}
