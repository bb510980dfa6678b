use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use curvplateau::cli::{run_file, RunOptions};

/// Prescribed-curvature graphs: axiom checks, solves, continuation and verification.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Args {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(n) = std::env::var("CURVPLATEAU_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let n = n.max(1).min(std::thread::available_parallelism().map_or(n, |p| p.get()));
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: thread pool: {e}");
        }
    }
    let outcome = run_file(
        &args.config,
        args.seed,
        &RunOptions {
            out_dir: args.out,
            quiet: args.quiet,
        },
    );
    if let (true, Some(m)) = (args.quiet, &outcome.message) {
        eprintln!("error: {m}");
    }
    ExitCode::from(outcome.exit_code as u8)
}
