//! Synthetic data generation, accuracy measures and the replicate harness.

mod eval;
mod harness;
mod sim;

pub use eval::{average, evaluate_chain, evaluate_lasso, EvalReport};
pub use harness::{
    expand_grid, run_benchmark, run_replicate, run_with_streams, write_csv, BenchRow, BenchmarkOutcome,
};
pub use sim::{generate_dataset, Dataset, Method, Scenario, SimConfig, Truth};
