//! `twine`: compile, benchmark and post-process line-connectivity QFT
//! circuits.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use twine::bench::Method;

mod bench;
mod files;
mod manifest;
mod svg;
mod vote;

/// A problem with the request itself (bad flag value, malformed input
/// file). Maps to exit code 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl Usage {
    pub fn err(msg: impl Into<String>) -> anyhow::Error {
        anyhow::Error::new(Usage(msg.into()))
    }
}

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

#[derive(Parser)]
#[command(
    name = "twine",
    version,
    about = "Parity-twine QFT compiler and benchmark harness"
)]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
        .map_err(|_| format!("expected one of ptn-cnot, ptn-iswap, fowler; got `{s}`"))
}

#[derive(Subcommand)]
enum Command {
    /// Compile the n-qubit QFT and write circuit, QASM and placement files.
    Compile {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_method)]
        method: Method,
        /// Output directory (default: $TWINE_OUT_DIR, then ./twine-out).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep n and methods under noise and write results.csv and a plot.
    Bench(bench::BenchArgs),
    /// Plurality-vote over variant count files.
    Vote(vote::VoteArgs),
    /// Gate counts and depths of a circuit file, as JSON.
    Report {
        file: PathBuf,
        /// Second circuit to compare counts against.
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
    /// Convert a circuit file to OpenQASM 2.
    ExportQasm {
        file: PathBuf,
        /// Write here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Score externally measured counts with the process-fidelity estimator.
    IngestCounts(IngestArgs),
}

#[derive(Args)]
pub struct IngestArgs {
    /// Directory holding the counts files.
    dir: PathBuf,
    /// JSON manifest mapping each file to its k and output permutation.
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()?;
    match cli.command {
        // The collector blocks, so it stays off the pool.
        Command::Bench(args) => bench::run(args, &pool),
        Command::Compile { n, method, out } => {
            pool.install(|| files::compile(n, method, out.as_deref()))
        }
        Command::Vote(args) => pool.install(|| vote::run(args)),
        Command::Report { file, baseline } => files::report(&file, baseline.as_deref()),
        Command::ExportQasm { file, output } => files::export_qasm(&file, output.as_deref()),
        Command::IngestCounts(args) => {
            files::ingest(&args.dir, &args.manifest, args.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.downcast_ref::<Usage>().is_some() {
                2
            } else {
                1
            })
        }
    }
}
