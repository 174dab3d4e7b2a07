//! `slate`: run, replay, render and inspect agent episodes.

mod commands;
mod config;
mod error;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use slate_core::agent::Registry;
use tracing_subscriber::EnvFilter;

use crate::config::{resolve, FileConfig, FlagOverrides};
use crate::error::CliError;

const DEFAULT_CANVAS_WIDTH: u32 = 500;

/// Exit codes: 0 ok, 2 usage, 3 budget exhausted, 4 solver failure,
/// 5 I/O or config error, 6 replay digest mismatch, 7 invalid fragment.
#[derive(Parser)]
#[command(name = "slate", version, about = "Run and audit notebook-editing agent episodes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one episode per task file.
    Run(Box<RunArgs>),
    /// Re-apply a trajectory and verify its snapshot and render digests.
    Replay {
        file: PathBuf,
        /// Also rebuild every context from the task and compare digests.
        #[arg(long)]
        task: Option<PathBuf>,
    },
    /// Per-step token table for trajectories.
    Stats {
        files: Vec<PathBuf>,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Print the regeneration-vs-modification comparison on synthetic documents.
        #[arg(long)]
        synthetic: bool,
    },
    /// Render a snapshot document (or fragment) to PNG.
    Render {
        snapshot: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CANVAS_WIDTH)]
        canvas_width: u32,
    },
    /// Parse and validate a fragment; prints the first diagnostic.
    Validate {
        fragment: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CANVAS_WIDTH)]
        canvas_width: u32,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Task JSON file; repeat for several episodes.
    #[arg(long = "task", required = true)]
    tasks: Vec<PathBuf>,
    /// Reference PNG, overriding the task's own.
    #[arg(long)]
    image: Option<PathBuf>,
    #[arg(long)]
    budget: Option<u32>,
    /// Solver: scripted, cassette or llm.
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    cassette: Option<PathBuf>,
    #[arg(long)]
    script: Option<PathBuf>,
    /// Critic: diff, none or llm.
    #[arg(long)]
    critic: Option<String>,
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write every exchange to this cassette file.
    #[arg(long)]
    record_cassette: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    canvas_width: Option<u32>,
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    model: Option<String>,
}

fn registry() -> Registry {
    let mut r = Registry::with_defaults();
    slate_llm::register(&mut r);
    r
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Run(args) => {
            let file = match &args.config {
                Some(p) => FileConfig::load(p)?,
                None => FileConfig::default(),
            };
            let flags = FlagOverrides {
                budget: args.budget,
                canvas_width: args.canvas_width,
                backend: args.backend,
                script: args.script,
                cassette: args.cassette,
                critic: args.critic,
                out: args.out,
                jobs: args.jobs,
                endpoint: args.endpoint,
                model: args.model,
            };
            let resolved = resolve(file, &flags)?;
            let req = run::RunRequest {
                tasks: args.tasks,
                image: args.image,
                record_cassette: args.record_cassette,
            };
            run::cmd_run(&registry(), &resolved, &req)
        }
        Command::Replay { file, task } => commands::cmd_replay(&file, task.as_deref()),
        Command::Stats { files, csv, synthetic } => commands::cmd_stats(&commands::StatsRequest { files, csv, synthetic }),
        Command::Render {
            snapshot,
            out,
            canvas_width,
        } => commands::cmd_render(&snapshot, &out, canvas_width),
        Command::Validate { fragment, canvas_width } => commands::cmd_validate(&fragment, canvas_width),
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("warn")))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
