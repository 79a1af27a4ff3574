mod commands;
mod error;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use graphstate::claims::Verdict;

use commands::{BuildArgs, MeasureArgs, OrbitArgs, VerifyArgs};
use error::CliError;

/// Exit statuses for `verify`; other commands use 0 or an error status.
const EXIT_FAIL: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "graphstate", version, about = "Graph states, entanglement measures and claim verification")]
struct Cli {
    /// Worker threads for claim populations (default: all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Directory for verify reports
    #[arg(long, global = true, env = "GRAPHSTATE_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a graph state and write it as JSON
    Build(BuildArgs),
    /// Compute entanglement measures of a graph state or named state
    Measure(MeasureArgs),
    /// Run a claim check and write JSON + CSV reports
    Verify(VerifyArgs),
    /// List the local-complementation orbit of a graph
    Orbit(OrbitArgs),
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::Usage("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let start = Instant::now();
    let code = match &cli.command {
        Command::Build(a) => commands::build(a).map(|_| 0)?,
        Command::Measure(a) => commands::measure(a).map(|_| 0)?,
        Command::Orbit(a) => commands::orbit(a).map(|_| 0)?,
        Command::Verify(a) => {
            let report = commands::verify(a)?;
            let stem = commands::report_stem(a);
            let (json, csv) = output::write_report(&report, &cli.out_dir, &stem)?;
            let s = report.summary;
            println!(
                "{}: {} (pass {}, fail {}, inconclusive {}, n/a {})",
                report.claim, report.verdict, s.pass, s.fail, s.inconclusive, s.not_applicable
            );
            println!("wrote {} and {}", json.display(), csv.display());
            match report.verdict {
                Verdict::Pass | Verdict::NotApplicable => 0,
                Verdict::Inconclusive => EXIT_INCONCLUSIVE,
                Verdict::Fail => EXIT_FAIL,
            }
        }
    };
    eprintln!("wall-clock: {:.3}s", start.elapsed().as_secs_f64());
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
