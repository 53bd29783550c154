use std::path::PathBuf;

use clap::{Parser, Subcommand};
use tomd_cli::commands::{
    cmd_cluster, cmd_decompose, cmd_metrics, cmd_reconstruct_bench, cmd_sweep, AdmmOverrides,
    BenchOptions, ClusterOptions, DecomposeOptions, MetricsOptions, SweepOptions,
};

#[derive(Parser)]
#[command(
    name = "tomd",
    version,
    about = "Tucker-O-Minus tensor decomposition and multi-view subspace clustering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one decomposition to a 4-way tensor file and write its factors.
    Decompose {
        /// Tensor text file (first line extents, then one value per line).
        #[arg(long)]
        input: PathBuf,
        /// tomd, tucker, tutr, or ominus.
        #[arg(long, default_value = "tomd")]
        method: String,
        /// Rank spec: tomd "R1,R2,R3,R4:D1,...,D6", tucker "R1,...,R4",
        /// tutr "R1,...,R4:D1,...,D4", ominus "D1,...,D6". Default: all 2.
        #[arg(long)]
        rank: Option<String>,
        /// ALS sweep cap (default 500).
        #[arg(long)]
        iter_max: Option<usize>,
        /// ALS stopping tolerance (default 1e-12).
        #[arg(long)]
        tol: Option<f64>,
        /// Initialization seed (default 0).
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for factors and summary.json.
        #[arg(long)]
        out: PathBuf,
        /// Also write the reconstruction to this tensor text file.
        #[arg(long)]
        reconstruction: Option<PathBuf>,
    },
    /// Fit several decompositions to one tensor and emit a comparison table.
    ReconstructBench {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated methods (default all four).
        #[arg(long)]
        methods: Option<String>,
        #[arg(long)]
        tomd_rank: Option<String>,
        #[arg(long)]
        tucker_rank: Option<String>,
        #[arg(long)]
        tutr_rank: Option<String>,
        #[arg(long)]
        ominus_rank: Option<String>,
        /// Mark each row with whether its RSE met this target.
        #[arg(long)]
        rse_target: Option<f64>,
        #[arg(long)]
        iter_max: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for bench.json and bench.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Multi-view clustering: ADMM, affinity, spectral clustering, metrics.
    Cluster {
        /// Dataset manifest JSON.
        #[arg(long)]
        manifest: PathBuf,
        /// Named preset supplying μ and K (yale, msrcv1, extendyaleb, orl,
        /// reuters, handwritten).
        #[arg(long)]
        preset: Option<String>,
        /// Graph-regularization weight μ.
        #[arg(long)]
        mu: Option<f64>,
        /// Adaptive-neighbor count K.
        #[arg(long)]
        k_neighbors: Option<usize>,
        /// Rank spec "R1,R2,R3,R4:D1,...,D6" ('v' = view count).
        #[arg(long)]
        rank: Option<String>,
        #[arg(long)]
        tau0: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        tau_max: Option<f64>,
        /// ADMM convergence tolerance (default 1e-7).
        #[arg(long)]
        tol: Option<f64>,
        /// ADMM iteration cap (default 150).
        #[arg(long)]
        iter_max: Option<usize>,
        /// Inner ALS sweep cap per Z-update (default 50).
        #[arg(long)]
        als_iter_max: Option<usize>,
        #[arg(long)]
        als_tol: Option<f64>,
        #[arg(long)]
        als_seed: Option<u64>,
        /// Cluster count (default: manifest k, else distinct label count).
        #[arg(long)]
        k: Option<usize>,
        /// Spectral-clustering seeds (default 0..9).
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Experiment config JSON; its fields override flags.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for report.json, affinity.csv, metrics.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Grid sweep over μ, K, and rank around a base configuration.
    Sweep {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        preset: Option<String>,
        /// Comma-separated μ grid.
        #[arg(long)]
        mu_grid: Option<String>,
        /// Comma-separated K grid.
        #[arg(long)]
        k_grid: Option<String>,
        /// Semicolon-separated rank specs ('default' allowed).
        #[arg(long)]
        rank_grid: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for sweep.json and sweep.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a predicted label file against a ground-truth label file.
    Metrics {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        /// Optional JSON output path (always printed to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Decompose {
            input,
            method,
            rank,
            iter_max,
            tol,
            seed,
            out,
            reconstruction,
        } => cmd_decompose(&DecomposeOptions {
            input,
            method,
            rank,
            iter_max,
            tol,
            seed,
            out,
            reconstruction,
        }),
        Command::ReconstructBench {
            input,
            methods,
            tomd_rank,
            tucker_rank,
            tutr_rank,
            ominus_rank,
            rse_target,
            iter_max,
            tol,
            seed,
            out,
        } => cmd_reconstruct_bench(&BenchOptions {
            input,
            methods,
            tomd_rank,
            tucker_rank,
            tutr_rank,
            ominus_rank,
            rse_target,
            iter_max,
            tol,
            seed,
            out,
        }),
        Command::Cluster {
            manifest,
            preset,
            mu,
            k_neighbors,
            rank,
            tau0,
            beta,
            tau_max,
            tol,
            iter_max,
            als_iter_max,
            als_tol,
            als_seed,
            k,
            seeds,
            config,
            out,
        } => cmd_cluster(&ClusterOptions {
            manifest,
            preset,
            flags: AdmmOverrides {
                mu,
                k_neighbors,
                rank,
                tau0,
                beta,
                tau_max,
                tol,
                iter_max,
                als_iter_max,
                als_tol,
                als_seed,
            },
            k,
            seeds,
            config,
            out,
        }),
        Command::Sweep {
            manifest,
            preset,
            mu_grid,
            k_grid,
            rank_grid,
            k,
            seeds,
            config,
            out,
        } => cmd_sweep(&SweepOptions {
            manifest,
            preset,
            mu_grid,
            k_grid,
            rank_grid,
            k,
            seeds,
            config,
            out,
        }),
        Command::Metrics { pred, truth, out } => cmd_metrics(&MetricsOptions { pred, truth, out }),
    };
    if let Err(e) = result {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
