use std::path::PathBuf;
use std::process::ExitCode;

use arbormatch::commands::{self, ExactOracles, VerifyParams};
use arbormatch::{CliError, EstimateParams, RunReport, SweepParams};
use clap::{Args, Parser, Subcommand};

/// Matching-size estimation for bounded-arboricity edge streams.
#[derive(Parser)]
#[command(name = "arbormatch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct EstimatorFlags {
    /// Arboricity bound; tracked edges expire after more than this many later neighbours.
    #[arg(long)]
    alpha: u32,
    /// Target relative error, strictly between 0 and 1.
    #[arg(long, default_value_t = 0.2)]
    epsilon: f64,
    /// Master seed.
    #[arg(long, env = "ARBORMATCH_SEED", default_value_t = 0)]
    seed: u64,
    /// Override the default capacity ceil(30 eps^-2 log2 n).
    #[arg(long)]
    capacity: Option<usize>,
}

impl EstimatorFlags {
    fn params(&self) -> EstimateParams {
        EstimateParams {
            alpha: self.alpha,
            epsilon: self.epsilon,
            seed: self.seed,
            capacity: self.capacity,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact E_alpha, E*, matching size and arboricity of an edge-list file.
    Exact {
        #[arg(long)]
        alpha: usize,
        file: PathBuf,
    },
    /// One estimator pass over an edge-list file.
    Estimate {
        #[command(flatten)]
        flags: EstimatorFlags,
        file: PathBuf,
    },
    /// Write a random union of alpha spanning forests.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: usize,
        #[arg(long, env = "ARBORMATCH_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the sandwich bounds and report identities on random small instances.
    Verify {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 4)]
        min_n: usize,
        #[arg(long, default_value_t = 14)]
        max_n: usize,
        #[arg(long, default_value_t = 1)]
        min_alpha: usize,
        #[arg(long, default_value_t = 3)]
        max_alpha: usize,
        #[arg(long, env = "ARBORMATCH_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Run the estimator under many seeds and score it against the exact E*.
    Sweep {
        #[command(flatten)]
        flags: EstimatorFlags,
        /// Number of seeded runs.
        #[arg(long, default_value_t = 100)]
        seeds: usize,
        /// Required fraction of runs within (1 +/- eps) E*.
        #[arg(long, default_value_t = 0.9)]
        threshold: f64,
        file: PathBuf,
    },
}

fn dispatch(command: Command) -> Result<RunReport, CliError> {
    match command {
        Command::Exact { alpha, file } => commands::cmd_exact(&file, alpha),
        Command::Estimate { flags, file } => commands::cmd_estimate(&file, flags.params()),
        Command::Generate { n, alpha, seed, out } => commands::cmd_generate(n, alpha, seed, &out),
        Command::Verify {
            trials,
            min_n,
            max_n,
            min_alpha,
            max_alpha,
            seed,
        } => commands::cmd_verify(
            VerifyParams {
                trials,
                min_n,
                max_n,
                min_alpha,
                max_alpha,
                seed,
            },
            &ExactOracles,
        ),
        Command::Sweep {
            flags,
            seeds,
            threshold,
            file,
        } => commands::cmd_sweep(
            &file,
            SweepParams {
                estimate: flags.params(),
                seeds,
                threshold,
            },
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(report) => {
            println!("{}", report.to_json());
            if report.success {
                ExitCode::SUCCESS
            } else {
                eprintln!("arbormatch: {} reported failures", report.command);
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("arbormatch: error: {e}");
            ExitCode::from(2)
        }
    }
}
