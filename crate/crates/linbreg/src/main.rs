use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use linbreg::experiment::{
    compare, generate_to_dir, run_experiment_to_dir, ExperimentConfig, PotentialKind,
};
use linbreg::solver::StepMode;

/// Linearised Bregman iteration testbed: phase unwrapping on 2D grids.
#[derive(Parser)]
#[command(name = "linbreg", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the dataset only: ground truth and noisy channels.
    Generate {
        #[command(flatten)]
        data: DataArgs,
        /// Output directory for truth.csv, f1.csv, f2.csv, truth.pgm.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one experiment end to end and write all artifacts.
    Run {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        solve: SolveArgs,
        /// Output directory for the run artifacts.
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarise completed run directories into a CSV table.
    Compare {
        /// Run directories written by `run`.
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
        /// Optional file for the table; stdout otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DataArgs {
    #[arg(long, default_value_t = 64)]
    rows: usize,
    #[arg(long, default_value_t = 64)]
    cols: usize,
    /// Multiplier on the ground-truth surface.
    #[arg(long, default_value_t = 1.0)]
    peaks_scale: f64,
    /// Standard deviation of the additive Gaussian noise.
    #[arg(long, default_value_t = 0.15)]
    sigma: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct SolveArgs {
    /// Potential: `gd` (plain gradient descent), `sobolev`, or `dct_l1`.
    #[arg(long, default_value = "gd")]
    potential: PotentialKind,
    /// Regularisation weight; defaults to 1000 (sobolev) or 50 (dct_l1).
    #[arg(long)]
    alpha: Option<f64>,
    /// Huber radius for dct_l1; 0 means plain soft thresholding.
    #[arg(long, default_value_t = 0.01)]
    mu: f64,
    /// Step size.
    #[arg(long, default_value_t = 1.5)]
    tau: f64,
    /// Decrease coefficient; derived from tau and the majorant constant
    /// when omitted.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    /// Step policy: `fixed` or `backtracking`.
    #[arg(long, default_value = "fixed")]
    mode: StepMode,
    /// Optional stopping rule on the gradient norm (useful when sigma = 0).
    #[arg(long)]
    gradient_tol: Option<f64>,
}

fn config_from(data: &DataArgs, solve: Option<&SolveArgs>) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        rows: data.rows,
        cols: data.cols,
        peaks_scale: data.peaks_scale,
        sigma: data.sigma,
        seed: data.seed,
        ..ExperimentConfig::default()
    };
    if let Some(s) = solve {
        cfg.potential = s.potential;
        cfg.alpha = s.alpha;
        cfg.mu = s.mu;
        cfg.tau = s.tau;
        cfg.rho = s.rho;
        cfg.max_iters = s.max_iters;
        cfg.mode = s.mode;
        cfg.gradient_tol = s.gradient_tol;
    }
    cfg
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> linbreg::Result<()> {
    match cli.command {
        Command::Generate { data, out } => {
            let cfg = config_from(&data, None);
            generate_to_dir(&cfg, &out)?;
            println!("wrote dataset ({}x{}, sigma {}) to {}", cfg.rows, cfg.cols, cfg.sigma, out.display());
            Ok(())
        }
        Command::Run { data, solve, out } => {
            let cfg = config_from(&data, Some(&solve));
            let outcome = run_experiment_to_dir(&cfg, &out)?;
            println!(
                "{}: {} iterations, stop {}, final E {:.6e} (threshold {:.6e}), artifacts in {}",
                cfg.potential,
                outcome.result.iterations,
                outcome.result.stop_reason,
                outcome.result.final_e,
                outcome.threshold,
                out.display()
            );
            Ok(())
        }
        Command::Compare { dirs, out } => {
            let table = compare(&dirs)?;
            match out {
                Some(path) => std::fs::write(path, table)?,
                None => print!("{table}"),
            }
            Ok(())
        }
    }
}
