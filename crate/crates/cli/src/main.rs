//! `latentswap`: one binary, one verb per stage.
//!
//! Exit codes are a contract for scripts: 0 success, 2 configuration,
//! 3 I/O, 4 numeric divergence, 5 checkpoint mismatch, 6 failed lemma
//! verification.

mod commands;
mod config;
mod inputs;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] latentswap::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} gated lemma instance(s) failed")]
    Verification(usize),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        use latentswap::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Verification(_) => 6,
            CliError::Core(e) => match e {
                E::Io { .. } | E::Format { .. } => 3,
                E::NonFiniteLoss { .. } | E::NotPositiveDefinite => 4,
                E::CheckpointMismatch(_) => 5,
                _ => 2,
            },
        }
    }
}

#[derive(Parser)]
#[command(name = "latentswap", version, about = "Guided attribute transfer on synthetic worlds")]
struct Cli {
    /// TOML run configuration; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides every seed in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output root.
    #[arg(long, global = true, env = "LATENTSWAP_OUT")]
    out: Option<PathBuf>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
struct ModelSource {
    /// Checkpoint to load (default: `<out>/train/latest.json`).
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the world and both datasets under `<out>/data`.
    GenData,
    /// Train on `<out>/data`, writing checkpoints and metrics to `<out>/train`.
    Train {
        /// Continue from `<out>/train/latest.json`.
        #[arg(long)]
        resume: bool,
    },
    /// Score a checkpoint (or the oracle) and write `<out>/eval.json`.
    Eval {
        #[command(flatten)]
        model: ModelSource,
        /// Evaluate the ideal translator instead of a checkpoint.
        #[arg(long)]
        oracle: bool,
    },
    /// `g(e1(source), e2(guide))`. Inputs are `A:<i>`, `B:<i>`, `.png` or `.json`.
    Transfer {
        #[command(flatten)]
        model: ModelSource,
        #[arg(long)]
        source: String,
        #[arg(long)]
        guide: String,
    },
    /// `g(e1(input), 0)`.
    Remove {
        #[command(flatten)]
        model: ModelSource,
        #[arg(long)]
        input: String,
    },
    /// Frames between the transfers of two guides onto one source.
    Interpolate {
        #[command(flatten)]
        model: ModelSource,
        #[arg(long)]
        source: String,
        #[arg(long)]
        guide: String,
        #[arg(long)]
        guide2: String,
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
    /// Sources × guides transfer grid.
    Grid {
        #[command(flatten)]
        model: ModelSource,
        /// Comma-separated inputs (default: `A:0..size`).
        #[arg(long, value_delimiter = ',')]
        sources: Vec<String>,
        /// Comma-separated inputs (default: `B:0..size`).
        #[arg(long, value_delimiter = ',')]
        guides: Vec<String>,
        #[arg(long, default_value_t = 4)]
        size: usize,
    },
    /// Run the lemma suite; writes `<out>/lemmas.json`.
    VerifyLemmas {
        /// Add one theorem instance under an asymmetric loss.
        #[arg(long)]
        inject_asymmetric: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.reseed(s);
    }
    if let Some(Command::VerifyLemmas { inject_asymmetric: true }) = cli.command {
        cfg.lemmas.inject_asymmetric = true;
    }
    if let Some(o) = cli.out {
        cfg.output_dir = o;
    }
    if cli.print_config {
        print!("{}", cfg.to_toml()?);
        return Ok(());
    }
    let Some(cmd) = cli.command else {
        return Err(CliError::Config("no command given (see --help)".into()));
    };
    cfg.validate()?;
    let ctx = commands::Context::new(cfg);
    match cmd {
        Command::GenData => ctx.gen_data(),
        Command::Train { resume } => ctx.train(resume),
        Command::Eval { model, oracle } => ctx.eval(model.checkpoint.as_deref(), oracle),
        Command::Transfer { model, source, guide } => ctx.transfer(model.checkpoint.as_deref(), &source, &guide),
        Command::Remove { model, input } => ctx.remove(model.checkpoint.as_deref(), &input),
        Command::Interpolate {
            model,
            source,
            guide,
            guide2,
            steps,
        } => ctx.interpolate(model.checkpoint.as_deref(), &source, &guide, &guide2, steps),
        Command::Grid {
            model,
            sources,
            guides,
            size,
        } => ctx.grid(model.checkpoint.as_deref(), sources, guides, size),
        Command::VerifyLemmas { .. } => ctx.verify_lemmas(),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
