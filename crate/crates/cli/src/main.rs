use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use growthlab::budget::Budget;
use growthlab::report::{Report, Verdict};
use growthlab::suites::{self, SuiteError, DEFAULT_SEED};

mod scenario;

const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "growthlab", version, about = "Exact verification of finite fragments of measure-algebra constructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(clap::Args)]
struct Output {
    /// Seed for randomized checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Cap on every search guard (overrides GROWTHLAB_BUDGET).
    #[arg(long)]
    budget: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks of a scenario file.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Run a named verification suite.
    Verify {
        suite: String,
        #[command(flatten)]
        output: Output,
    },
    /// Print the scenario schemas and suite names.
    Describe,
}

fn budget(flag: Option<u64>) -> anyhow::Result<Budget> {
    match flag {
        Some(cap) => Ok(Budget::uniform(cap)),
        None => Budget::from_env().map_err(anyhow::Error::msg),
    }
}

fn write_atomically(path: &Path, text: &str) -> anyhow::Result<()> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
    f.write_all(text.as_bytes())?;
    f.sync_all()?;
    fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))
}

fn emit(report: &Report, output: &Output) -> anyhow::Result<ExitCode> {
    let text = match output.format {
        Format::Json => report.to_json(),
        Format::Table => report.to_table(),
    };
    match &output.out {
        Some(path) => write_atomically(path, &text)?,
        None => {
            // a closed pipe (e.g. `| head`) is not an error
            let mut out = std::io::stdout().lock();
            if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(e.into());
                }
            }
        }
    }
    Ok(ExitCode::from(match report.verdict {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Unknown => 2,
    }))
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let started = Instant::now();
    let result = match cli.command {
        Command::Describe => {
            println!("{}", serde_json::to_string_pretty(&scenario::describe()).expect("static JSON"));
            return ExitCode::SUCCESS;
        }
        Command::Run { scenario: path, output } => {
            let text = match fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => return usage(format!("{}: {e}", path.display())),
            };
            let mut file = match scenario::parse(&text) {
                Ok(f) => f,
                Err(e) => return usage(format!("{}: {e}", path.display())),
            };
            if output.seed.is_some() {
                file.seed = output.seed;
            }
            let budget = match budget(output.budget) {
                Ok(b) => b,
                Err(e) => return usage(e),
            };
            match scenario::run(file, &budget) {
                Ok(report) => emit(&report, &output),
                Err(e) => return usage(format!("{}: {e}", path.display())),
            }
        }
        Command::Verify { suite, output } => {
            let budget = match budget(output.budget) {
                Ok(b) => b,
                Err(e) => return usage(e),
            };
            match suites::run_suite(&suite, output.seed.unwrap_or(DEFAULT_SEED), &budget) {
                Ok(report) => emit(&report, &output),
                Err(e @ SuiteError::UnknownSuite(_)) => {
                    return usage(format!("{e}; known suites: {}", suites::SUITES.join(", ")))
                }
                Err(e) => Err(e.into()),
            }
        }
    };
    // timing stays out of the report so that reports are reproducible
    eprintln!("elapsed: {:.3}s", started.elapsed().as_secs_f64());
    match result {
        Ok(code) => code,
        Err(e) => usage(format!("{e:#}")),
    }
}
