//! Problem generation, file I/O, configuration and experiment orchestration.

pub mod config;
pub mod experiment;
pub mod generate;
pub mod matrix_io;

pub use config::{ExperimentConfig, ProblemConfig, ProblemSource, RunConfig};
pub use experiment::{reference_optimum, run_experiment, write_report, write_trace, ExperimentReport};
pub use generate::{
    build_dual, build_lasso, build_logistic, error_bound_counterexample, generate_dual, generate_lasso, generate_logistic,
    DualSpec, GeneratedProblem, LassoSpec, LogisticSpec,
};
pub use matrix_io::{read_matrix_market, read_vector, write_matrix_market, write_vector, CooMatrix};
