//! Quantum walk-based optimisation (QWOA) for the capacitated vehicle routing
//! problem.
//!
//! The crate is organised bottom-up:
//!
//! - [`partitions`]: Lah numbers, solution-space cardinality and the
//!   index/unindex bijection between routing solutions and integers.
//! - [`cvrp`]: problem instances, the solution cost function, quality tables
//!   and random instance generation.
//! - [`qwoa`]: the statevector engine over the valid solutions (phase shifts,
//!   complete-graph walks, expectation and distribution analysis).
//! - [`circuit`]: a dense gate-level model of the state-preparation and walk
//!   circuits, checked against the closed-form walk.
//! - [`optimize`]: the variational loop (finite-difference BFGS with restarts).
//! - [`baseline`]: the classical random-sampling baseline, power-law fits and
//!   comparison tables.
//! - [`export`]: CSV rendering for every exported table.

pub mod baseline;
pub mod circuit;
pub mod cvrp;
pub mod export;
pub mod instances;
pub mod optimize;
pub mod partitions;
pub mod qwoa;

pub use baseline::{
    compare, expected_best_of, fit_power_law, monte_carlo_best_of, ConvergenceRecord, Curve,
    PowerLawFit,
};
pub use circuit::{verify, GateCircuit, VerificationReport};
pub use cvrp::{build_quality_table, cost, CvrpInstance, GenerationConfig, QualityTable};
pub use optimize::{convergence_sweep, optimize_at_depth, OptimizationRun, OptimizerConfig};
pub use partitions::{cardinality, lah, SolutionIndex, SolutionPartition, SolutionSpace};
pub use qwoa::{AmplitudeVector, VariationalParams};
