//! `disclose`: experiment runner for budgeted disclosure on agent/target graphs.

mod commands;
mod config;
mod error;
mod output;
mod pool;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ExperimentConfig;
use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "disclose", version, about = "Budgeted disclosure experiments on bipartite agent/target graphs")]
struct Cli {
    /// JSON config; any flag given on the command line overrides it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build graphs from a dataset, a random model or a fixture and write them with statistics.
    Gen(ExperimentConfig),
    /// Run reveal algorithms over a budget grid, plus the reveal-none and reveal-all baselines.
    Reveal(ExperimentConfig),
    /// Per-group budgets and prioritized greedy on a grouped graph.
    Fairness(ExperimentConfig),
    /// Pre- and post-reveal interventions against plain greedy.
    Intervene(ExperimentConfig),
    /// Greedy radius expansion on a point instance.
    Coverage(ExperimentConfig),
    /// Train/test trials of greedy reveal sets.
    Learn(ExperimentConfig),
    /// Like `reveal` on a named fixture, with the exhaustive optimum when affordable.
    Fixture {
        /// Fixture name, e.g. `TAB7` or `FAM-POSNEG:3`.
        name: String,
        #[command(flatten)]
        opts: ExperimentConfig,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Reveal(_) => "reveal",
            Command::Fairness(_) => "fairness",
            Command::Intervene(_) => "intervene",
            Command::Coverage(_) => "coverage",
            Command::Learn(_) => "learn",
            Command::Fixture { .. } => "fixture",
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    pool::configure_threads()?;
    let file = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let name = cli.command.name();
    file.check_command(name)?;
    match cli.command {
        Command::Gen(flags) => commands::gen::run(&flags.over(file)),
        Command::Reveal(flags) => commands::reveal::run(&flags.over(file), name, &["greedy"], false),
        Command::Fairness(flags) => commands::fairness::run(&flags.over(file)),
        Command::Intervene(flags) => commands::intervene::run(&flags.over(file)),
        Command::Coverage(flags) => commands::coverage::run(&flags.over(file)),
        Command::Learn(flags) => commands::learn::run(&flags.over(file)),
        Command::Fixture { name: fixture, opts } => {
            let mut cfg = opts.over(file);
            if cfg.graph.is_some() {
                return Err(CliError::Config("`fixture` takes no --graph".into()));
            }
            cfg.fixture = Some(fixture);
            commands::reveal::run(&cfg, name, &["greedy", "bruteforce"], true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("disclose: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
