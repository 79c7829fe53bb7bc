//! Command-line front end for `qlocal`.
//!
//! Exit codes: 0 the command ran (whatever the verdict), 1 numerical
//! failure, 2 input failure, 3 internal-consistency alarm.

pub mod commands;
pub mod error;
pub mod format;
pub mod report;
pub mod spec;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qlocal::Exec;

use commands::{GenerateParams, RunOptions};
pub use error::CliError;

const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(
    name = "qlocal",
    version,
    about = "Locality analysis for bipartite quantum channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Numerical tolerance for every decision.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Base seed for random probe states.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random probe states per check.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Record runtime_ms as null so reports are byte-for-byte reproducible.
    #[arg(long)]
    omit_timing: bool,
    /// Run probe loops on one thread.
    #[arg(long)]
    sequential: bool,
}

impl ReportArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            tol: self.tol,
            seed: self.seed,
            trials: self.trials,
            report: self.report.clone(),
            omit_timing: self.omit_timing,
            exec: if self.sequential {
                Exec::Sequential
            } else {
                Exec::Parallel
            },
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rewrite a channel file in another representation.
    Convert {
        input: PathBuf,
        output: PathBuf,
        /// kraus, choi, unitary or stinespring.
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Restrict to subsystem A at each environment state and test slice factorization.
    Analyze {
        input: PathBuf,
        /// Bipartite split dAxdB; defaults to the file's dims.
        #[arg(long)]
        dims: Option<String>,
        /// Environment state: index, +, -, +i, -i, theta:<rad>, scan:<N> or a vector literal.
        #[arg(long, required = true)]
        xi: Vec<String>,
        #[command(flatten)]
        common: ReportArgs,
    },
    /// Run one of the locality pipelines (1 slice, 2 two-state, 3 global).
    Verify {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        theorem: u8,
        input: PathBuf,
        #[arg(long)]
        dims: Option<String>,
        #[arg(long)]
        xi: Vec<String>,
        #[command(flatten)]
        common: ReportArgs,
    },
    /// Write a gallery channel to a file.
    Generate {
        /// identity, controlled, orthogonal-cloner, swap, depolarizing, random or product.
        name: String,
        #[arg(long)]
        d: Option<usize>,
        /// Comma-separated gate names for `controlled`.
        #[arg(long)]
        unitaries: Option<String>,
        #[arg(long)]
        din: Option<usize>,
        #[arg(long)]
        dout: Option<usize>,
        #[arg(long)]
        denv: Option<usize>,
        #[arg(long)]
        da: Option<usize>,
        #[arg(long)]
        db: Option<usize>,
        /// Bipartite split to record in the file.
        #[arg(long)]
        dims: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Convert {
            input,
            output,
            to,
            tol,
        } => commands::run_convert(&input, &output, &to, tol),
        Command::Analyze {
            input,
            dims,
            xi,
            common,
        } => commands::run_analyze(&input, dims.as_deref(), &xi, &common.options()),
        Command::Verify {
            theorem,
            input,
            dims,
            xi,
            common,
        } => commands::run_verify(theorem, &input, dims.as_deref(), &xi, &common.options()),
        Command::Generate {
            name,
            d,
            unitaries,
            din,
            dout,
            denv,
            da,
            db,
            dims,
            seed,
            out,
        } => {
            let params = GenerateParams {
                d,
                unitaries,
                din,
                dout,
                denv,
                da,
                db,
                dims,
                seed,
            };
            commands::run_generate(&name, &params, &out)
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qlocal: {e}");
            e.code()
        }
    }
}
