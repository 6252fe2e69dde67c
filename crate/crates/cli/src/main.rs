//! `qwoa-cvrp`: batch experiments for quantum walk-based optimisation of
//! capacitated vehicle routing problems.

mod commands;
mod error;
mod output;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "qwoa-cvrp",
    version,
    about = "QWOA simulation and analysis for capacitated vehicle routing"
)]
pub struct Cli {
    /// Output directory for artifacts.
    #[arg(long, global = true, env = "QWOA_OUT_DIR", default_value = ".")]
    pub out: PathBuf,

    /// Worker thread cap (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct InstanceArg {
    /// Instance JSON file with fields n, capacity, packages, costs.
    #[arg(long)]
    pub instance: PathBuf,

    /// Refuse to build tables larger than this many solutions.
    #[arg(long, default_value_t = qwoa_cvrp::cvrp::DEFAULT_MAX_SOLUTIONS)]
    pub max_solutions: u64,
}

#[derive(Debug, Args, Clone)]
pub struct OptimizerArgs {
    /// Depths: a list `1,2,5` or an inclusive range `1..10`.
    #[arg(long, default_value = "1..10")]
    pub r: String,

    /// Random starts per depth (in addition to warm starts).
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,

    /// Objective evaluations per depth.
    #[arg(long, default_value_t = 5000)]
    pub budget: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-6)]
    pub step: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        capacity: u64,
        #[arg(long, default_value_t = 5)]
        min_packages: u64,
        #[arg(long, default_value_t = 30)]
        max_packages: u64,
        #[arg(long, default_value_t = 1)]
        min_cost: u64,
        #[arg(long, default_value_t = 15)]
        max_cost: u64,
        #[arg(long, default_value_t = 10)]
        min_depot_cost: u64,
        #[arg(long, default_value_t = 20)]
        max_depot_cost: u64,
        /// Draw both directions of every edge independently.
        #[arg(long)]
        asymmetric: bool,
    },
    /// Check an instance file.
    Validate {
        #[arg(long)]
        instance: PathBuf,
    },
    /// List every solution with its index.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = qwoa_cvrp::cvrp::DEFAULT_MAX_SOLUTIONS)]
        max_solutions: u64,
    },
    /// Index of a solution such as "[[1,2],[3]]".
    Index {
        #[arg(long)]
        solution: String,
    },
    /// Solution with a given index.
    Unindex {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        index: String,
    },
    /// Cost of one solution.
    Cost {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: String,
    },
    /// Quality of every solution.
    Qualities {
        #[command(flatten)]
        instance: InstanceArg,
    },
    /// Brute-force optimum.
    Optimum {
        #[command(flatten)]
        instance: InstanceArg,
    },
    /// Evolve the ansatz with given parameters and export the final state.
    Simulate {
        #[command(flatten)]
        instance: InstanceArg,
        /// Comma-separated phase angles.
        #[arg(long, allow_hyphen_values = true)]
        gammas: Option<String>,
        /// Comma-separated walk times.
        #[arg(long)]
        times: Option<String>,
        /// Parameters CSV from `optimize`; used with --r.
        #[arg(long, conflicts_with_all = ["gammas", "times"])]
        params: Option<PathBuf>,
        #[arg(long, requires = "params")]
        r: Option<usize>,
    },
    /// Optimise the ansatz over a range of depths.
    Optimize {
        #[command(flatten)]
        instance: InstanceArg,
        #[command(flatten)]
        opt: OptimizerArgs,
        /// Depths whose optimised states are exported (e.g. `10,35`).
        #[arg(long)]
        export_states: Option<String>,
    },
    /// Classical random-sampling baseline for 2r samples.
    Baseline {
        #[command(flatten)]
        instance: InstanceArg,
        #[arg(long, default_value = "1..10")]
        r: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Optimise and compare against the classical baseline.
    Compare {
        #[command(flatten)]
        instance: InstanceArg,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Check the preparation and walk circuits gate by gate.
    VerifyCircuit {
        /// Solution-space sizes.
        #[arg(long, default_value = "3,4,5,6,7,12")]
        m: String,
        /// Walk times.
        #[arg(long, default_value = "0.1,0.7,1.9,4.3")]
        t: String,
    },
    /// Render an exported CSV as SVG.
    Plot {
        #[arg(long)]
        input: PathBuf,
        /// Output file name inside --out (defaults to the input stem).
        #[arg(long)]
        output: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("{}", Failure::Usage("--threads must be at least 1".into()));
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("{}", Failure::Other(e.to_string()));
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.exit_code())
        }
    }
}
