//! File-based pipelines over the `esspec` library: generate a graph, compute
//! truncated spectra, enumerate limit classes, predict and verify.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use clap::Parser;

pub use commands::{execute, Outcome, EXIT_FAIL, EXIT_INCOMPLETE, EXIT_INVALID, EXIT_OK};
pub use config::{Command, JobConfig, PlotKind, Tolerances};

/// Parses `argv`, runs the job and returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run_cli(&cli) {
        Ok(out) => {
            println!("{}", out.summary);
            out.code
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_INVALID
        }
    }
}

fn run_cli(cli: &args::Cli) -> anyhow::Result<Outcome> {
    if let Some(n) = cli.jobs {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let job = match (&cli.command, cli.command.job()?) {
        (args::Sub::Run { config }, _) => JobConfig::read(config)?,
        (_, Some(job)) => job,
        (_, None) => unreachable!("only run lacks an inline job"),
    };
    if cli.print_config {
        return Ok(Outcome {
            code: EXIT_OK,
            summary: serde_json::to_string_pretty(&job)?,
        });
    }
    execute(&job)
}
