//! `lowdens`: batch front end for data generation, training, guided
//! sampling and evaluation, driven by a TOML experiment config.
//!
//! Exit codes: 0 success, 1 usage error, 2 input error, 3 numerical abort,
//! 4 memorisation alarm.

mod commands;
mod failure;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::failure::{Failure, Kind};

#[derive(Debug, Parser)]
#[command(name = "lowdens", version, about = "Sample hard, low-density examples from small diffusion models")]
struct Cli {
    /// Experiment config file.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the default experiment config.
    InitConfig {
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate the train and holdout datasets.
    Gen,
    /// Train the diffusion model, the baseline corpus, the discriminator,
    /// the embedders and the class models.
    Train,
    /// Draw samples with one of the samplers.
    Sample(commands::SampleArgs),
    /// Shared-seed grid over (alpha, beta) with a per-cell report.
    Grid(commands::GridArgs),
    /// Density metrics, precision and correlations of sample files.
    Eval(commands::EvalArgs),
    /// Nearest-training-point memorisation audit of a sample file.
    Memcheck(commands::MemcheckArgs),
    /// Sampling-cost table of a guided run against a rejection run.
    Cost(commands::CostArgs),
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Command::InitConfig { out } = &cli.command {
        return commands::init_config(out);
    }
    let path = cli.config.ok_or_else(|| Failure::new(Kind::Usage, "--config is required"))?;
    let ctx = commands::Context::load(&path)?;
    match cli.command {
        Command::InitConfig { .. } => unreachable!("handled above"),
        Command::Gen => commands::gen(&ctx),
        Command::Train => commands::train(&ctx),
        Command::Sample(a) => commands::sample(&ctx, &a),
        Command::Grid(a) => commands::grid(&ctx, &a),
        Command::Eval(a) => commands::eval(&ctx, &a),
        Command::Memcheck(a) => commands::memcheck(&ctx, &a),
        Command::Cost(a) => commands::cost(&ctx, &a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("lowdens: error[{}]: {}", f.kind.as_str(), f.msg);
            ExitCode::from(f.kind.code())
        }
    }
}
