//! Parallel randomized block-coordinate descent (P-RCD) for composite convex
//! problems
//!
//! ```text
//! min_x  F(x) = sum_j f_j(x_{N_j}) + sum_i Psi_i(x_i)
//! ```
//!
//! where each smooth component `f_j` reads only the blocks in its neighbour set
//! `N_j` and every `Psi_i` acts on a single block. The stepsize of block `i` is
//! `w_i = sum_{j touching i} L_j`, so the method exploits both how many blocks a
//! component touches (`omega`) and how many components touch a block
//! (`omega_bar`).
//!
//! The crate is organised as
//!
//! - [`problem`]: block partition, bipartite incidence structure, weight matrix
//!   and the composite objective,
//! - [`smooth`]: the smooth component families (least-squares rows, logistic
//!   samples, conjugates of quadratics from dual decomposition),
//! - [`prox`]: separable regularizers, their proximal operators and the
//!   proximal-gradient mapping,
//! - [`sampling`]: tau-nice and partition-shuffle block samplers,
//! - [`solver`]: the synchronous parallel iteration with cached inner products,
//! - [`analysis`]: rate bounds and the empirical error-bound fitter,
//! - [`harness`]: problem generators, MatrixMarket I/O and experiment runner.
// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod problem;
pub mod prox;
pub mod sampling;
pub mod smooth;
pub mod solver;

pub use error::{Error, Result};
pub use problem::{BipartiteStructure, BlockPartition, CompositeProblem, WeightMatrix};
pub use prox::Regularizer;
pub use sampling::{Sampler, SamplerConfig, SamplingScheme};
pub use smooth::{SmoothComponent, SmoothKind};
pub use solver::{Mode, RunOutcome, RunStatus, Solver, SolverConfig, StopRule, Trace};
