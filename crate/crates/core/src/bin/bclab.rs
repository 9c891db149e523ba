use std::path::PathBuf;
use std::process::ExitCode;

use bclab::report::{self, Command, Overrides, EXIT_VALIDATION};
use clap::Parser;

/// Balanced configurations of the planar N-body problem.
#[derive(Parser, Debug)]
#[command(name = "bclab", version)]
struct Cli {
    /// One of: solve, sweep, diagrams, masscond, verify.
    command: Command,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    include_v3: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("BCLAB_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("bclab: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(EXIT_VALIDATION as u8);
        }
    };
    let overrides = Overrides {
        command: Some(cli.command),
        seed: cli.seed,
        starts: cli.starts,
        out: cli.out,
        include_v3: cli.include_v3,
    };
    let cfg = match report::parse_config_with(&text, &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("bclab: {}: {e}", cli.config.display());
            return ExitCode::from(EXIT_VALIDATION as u8);
        }
    };
    let (code, result) = report::run(&cfg);
    match result {
        Ok(r) => eprintln!("bclab: {} finished (exit {code}), output in {}", r.command.name(), cfg.output_dir.display()),
        Err(e) => eprintln!("bclab: {e}"),
    }
    ExitCode::from(code as u8)
}
