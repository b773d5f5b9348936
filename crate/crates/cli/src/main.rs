//! `equiproj`: build, apply and check soft-equivariance projectors, and run
//! the desk-scale benchmarks.

mod commands;
mod dmat;
mod error;
mod pgm;
mod report;
mod specfile;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "equiproj", version, about = "Soft-equivariance weight projectors")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, env = "EQUIPROJ_SEED", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Inv,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Svd,
    Schur,
}

#[derive(Debug, Args)]
pub struct ProjectorArgs {
    /// Group description (JSON).
    #[arg(long)]
    group: PathBuf,
    #[arg(long, value_enum, default_value_t = KindArg::Eq)]
    kind: KindArg,
    #[arg(long, value_enum, default_value_t = RouteArg::Svd)]
    route: RouteArg,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a projector and write it as a DMAT1 matrix.
    BuildProjector {
        #[command(flatten)]
        target: ProjectorArgs,
        /// Cutoff b.
        #[arg(long, conflicts_with = "softness", required_unless_present = "softness")]
        cutoff: Option<f64>,
        /// Fraction in [0, 1] of non-null directions to keep.
        #[arg(long)]
        softness: Option<f64>,
        /// Width of the smooth cutoff; omitted means hard.
        #[arg(long)]
        smooth_s: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Metadata report (JSON).
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Apply a projector to a weight matrix.
    Project {
        #[arg(long)]
        projector: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the first-order equivariance bound on random projected weights.
    VerifyBound {
        #[command(flatten)]
        target: ProjectorArgs,
        #[arg(long)]
        cutoff: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-3, 3e-3, 1e-2])]
        t_values: Vec<f64>,
        /// Relative slack on the bound.
        #[arg(long, default_value_t = 0.05)]
        slack: f64,
        /// Report path; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the SVD and Schur routes on rotated grids.
    BenchDecomp {
        #[arg(long, value_delimiter = ',', default_values_t = [4usize, 6, 8])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        /// Cutoff of the timed projectors.
        #[arg(long, default_value_t = equiproj::bench::BENCH_CUTOFF)]
        cutoff: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plain vs projected MLP on the O(5) regression task.
    O5Bench {
        #[arg(long, default_value_t = 0.3)]
        gamma: f64,
        #[arg(long, default_value_t = 0.0)]
        softness: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [0u64, 1, 2])]
        seeds: Vec<u64>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 300)]
        epochs: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [40usize, 40])]
        hidden: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Projected random filters and their rotation errors as PGM images.
    DemoGrid {
        #[arg(long, default_value_t = 8)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        n_rot: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 1.0])]
        softness: Vec<f64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command, cli.seed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("equiproj: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
