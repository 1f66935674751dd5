//! Rate bounds and empirical error-bound diagnostics.

mod bounds;
mod gebp;
mod sigma;

pub use bounds::{GebpConstants, RateBundle};
pub use gebp::{estimate_gebp_constants, fit_gebp, gebp_violation, GebpFit, GebpSample};
pub use sigma::estimate_sigma_w;
