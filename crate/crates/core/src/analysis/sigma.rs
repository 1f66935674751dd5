use crate::error::{Error, Result};
use crate::linalg::inverse_power_iteration_sym;
use crate::problem::CompositeProblem;

/// Strong convexity modulus of a quadratic `f` in `|.|_W`: the smallest
/// eigenvalue of `W^{-1/2} H W^{-1/2}`. Non-quadratic problems must supply
/// the constant themselves.
pub fn estimate_sigma_w(problem: &CompositeProblem) -> Result<f64> {
    let mut h = problem.dense_hessian().ok_or_else(|| {
        Error::input("sigma_W can only be estimated for quadratic smooth parts")
    })?;
    let n = problem.dim();
    let part = problem.partition();
    let mut scale = vec![0.0; n];
    for i in 0..problem.num_blocks() {
        let s = 1.0 / problem.weights().weight(i).sqrt();
        for c in part.range(i) {
            scale[c] = s;
        }
    }
    for r in 0..n {
        for c in 0..n {
            h[r * n + c] *= scale[r] * scale[c];
        }
    }
    inverse_power_iteration_sym(&h, n, 10_000, 1e-15)
        .map_err(|_| Error::input("smooth part is not strongly convex (singular Hessian)"))
}
