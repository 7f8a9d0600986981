use std::path::PathBuf;
use std::process::ExitCode;

use circleweb_cli::{parse_config, run, RunError, EXIT_INVALID};
use clap::Parser;

/// Circular 3-webs on the sphere: verifications, reports and figures.
#[derive(Parser)]
#[command(name = "circleweb", version)]
struct Args {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory for report.json and figures; overrides [output] dir.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Sampling seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INVALID as u8)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_INVALID as u8);
        }
    };
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return fail(format!("{}: {e}", args.config.display())),
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => return fail(format!("{}: {e}", args.config.display())),
    };
    if let Some(dir) = args.output_dir {
        cfg.output_dir = dir;
    }
    if let Some(seed) = args.seed {
        cfg.set_seed(seed);
    }
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e @ RunError::Invalid(_)) | Err(e @ RunError::Io { .. }) => return fail(e),
    };
    for c in &outcome.report.checks {
        let rel = match c.relation {
            circleweb_cli::run::Relation::AtMost => "<=",
            circleweb_cli::run::Relation::AtLeast => ">=",
        };
        println!("{} {} = {:e} {rel} {:e}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.threshold);
    }
    for p in &outcome.written {
        println!("wrote {}", p.display());
    }
    ExitCode::from(outcome.report.exit_code() as u8)
}
