//! `msf` command-line front end: configuration parsing, subcommand dispatch
//! and serialization of spectra, maps and design solutions.
//!
//! Exit status: 0 success, 1 model or I/O error, 2 usage or configuration
//! error, 3 validation failure or solver non-convergence. Every error is also
//! written to standard error as a single-line JSON document.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;
pub mod units;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, ValueEnum};

use commands::{CliError, Destination, ErrorKind, Subcommand};
use config::OutputFormat;

#[derive(Debug, Parser)]
#[command(name = "msf", version, about = "Graphene metasurface absorber model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Subcommand)]
enum Command {
    /// Absorption spectrum at the configured angle and polarization.
    Spectrum(CommonArgs),
    /// Spectra and peak table for every configured angle in TE and TM.
    Angles(CommonArgs),
    /// Peak frequency and absorption for each chemical potential in `mu_c_values`.
    Reconfig(CommonArgs),
    /// Inverse design toward `target_frequency` (JSON output).
    Solve(CommonArgs),
    /// Circuit model against the transfer-matrix oracle (JSON output).
    Validate(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Configuration file (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

impl Command {
    fn split(self) -> (Subcommand, CommonArgs) {
        match self {
            Command::Spectrum(a) => (Subcommand::Spectrum, a),
            Command::Angles(a) => (Subcommand::Angles, a),
            Command::Reconfig(a) => (Subcommand::Reconfig, a),
            Command::Solve(a) => (Subcommand::Solve, a),
            Command::Validate(a) => (Subcommand::Validate, a),
        }
    }
}

/// Runs the CLI and returns the process exit status. `threads` is the value
/// of `MSF_THREADS`, if set.
pub fn run<I, T>(
    args: I,
    threads: Option<&str>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return 0;
        }
        Err(e) => {
            let err = CliError::new(ErrorKind::Usage, e.to_string().trim_end());
            let _ = writeln!(stderr, "{}", err.to_json());
            return err.kind.exit_code();
        }
    };
    match dispatch(cli, threads, stdout, stderr) {
        Ok(()) => 0,
        Err(err) => {
            let _ = writeln!(stderr, "{}", err.to_json());
            err.kind.exit_code()
        }
    }
}

fn dispatch(
    cli: Cli,
    threads: Option<&str>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let (command, args) = cli.command.split();
    let sweep = commands::sweep_options_from_env(threads)?;
    let config = commands::load_config(&args.config)?;
    let destination = Destination::resolve(&config, args.out, args.format.map(Into::into));
    let run = commands::execute(command, &config, destination.format, sweep)?;
    let text = run.artifacts.emit(destination.path.as_deref())?;
    match stdout
        .write_all(text.as_bytes())
        .and_then(|_| stdout.flush())
    {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            return Err(CliError::new(
                ErrorKind::Io,
                format!("standard output: {e}"),
            ));
        }
        _ => {}
    }
    for warning in &run.warnings {
        let _ = writeln!(stderr, "{warning}");
    }
    match run.failure {
        Some(err) => Err(err),
        None => Ok(()),
    }
}
