//! Batch front-end for the pseudolidar toolkit.
//!
//! Subcommands: `convert` (depth maps to pseudo-LiDAR `.bin`), `fit` (the
//! heuristic frustum detector), `eval` (AP40 reports), `depth-diag` (depth
//! accuracy vs distance), `selftest` (embedded oracle suite).

mod commands;
mod config;
mod dataset;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::RunConfig;
use pseudolidar::metrics::DontCareMode;

/// Exit codes shared by all subcommands.
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_FRAME_FAILURES: u8 = 2;
pub const EXIT_EVAL_INPUT: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "pseudolidar", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    Exp2,
    Exp4,
    Exp5,
    Exp7,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DontCareArg {
    Official,
    Simple,
}

#[derive(Debug, Parser)]
struct CommonArgs {
    /// Run configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the configured pseudo-LiDAR variant.
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Override the global sampling seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = automatic).
    #[arg(long)]
    jobs: Option<usize>,
    /// Keep going when individual frames fail; exit 0 with a summary.
    #[arg(long)]
    tolerate_frame_errors: bool,
    /// Override DontCare-region handling in evaluation.
    #[arg(long, value_enum)]
    dontcare_mode: Option<DontCareArg>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build pseudo-LiDAR point clouds and the run manifest.
    Convert(CommonArgs),
    /// Fit 3D boxes from GT 2D boxes over the converted clouds.
    Fit(CommonArgs),
    /// Evaluate detection files against ground truth (AP40).
    Eval(CommonArgs),
    /// Depth accuracy versus distance from GT 2D boxes.
    DepthDiag(CommonArgs),
    /// Run the embedded oracle suite and print a pass/fail matrix.
    Selftest {
        /// Smaller sample sizes for a fast smoke run.
        #[arg(long)]
        quick: bool,
    },
}

/// Errors carrying the process exit code.
pub enum CliError {
    Config(anyhow::Error),
    FrameFailures(usize),
    EvalInput(anyhow::Error),
}

impl CliError {
    fn report(self) -> ExitCode {
        match self {
            CliError::Config(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(EXIT_CONFIG)
            }
            CliError::FrameFailures(n) => {
                eprintln!("error: {n} frame(s) failed");
                ExitCode::from(EXIT_FRAME_FAILURES)
            }
            CliError::EvalInput(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(EXIT_EVAL_INPUT)
            }
        }
    }
}

fn resolve_config(args: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::load(&args.config).map_err(CliError::Config)?;
    if let Some(v) = args.variant {
        config.variant.name = match v {
            VariantArg::Exp2 => "exp2",
            VariantArg::Exp4 => "exp4",
            VariantArg::Exp5 => "exp5",
            VariantArg::Exp7 => "exp7",
        }
        .to_string();
    }
    if let Some(seed) = args.seed {
        config.global_seed = seed;
    }
    if let Some(jobs) = args.jobs {
        config.jobs = jobs;
    }
    if let Some(mode) = args.dontcare_mode {
        config.eval.dontcare_mode = match mode {
            DontCareArg::Official => DontCareMode::Official,
            DontCareArg::Simple => DontCareMode::Simple,
        };
    }
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    config.validate().map_err(CliError::Config)?;
    Ok(config)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Convert(args) => {
            resolve_config(args).and_then(|c| commands::convert::run(&c, args.tolerate_frame_errors))
        }
        Command::Fit(args) => {
            resolve_config(args).and_then(|c| commands::fit::run(&c, args.tolerate_frame_errors))
        }
        Command::Eval(args) => resolve_config(args).and_then(|c| commands::eval::run(&c)),
        Command::DepthDiag(args) => {
            resolve_config(args).and_then(|c| commands::depth_diag::run(&c))
        }
        Command::Selftest { quick } => commands::selftest::run(*quick),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
