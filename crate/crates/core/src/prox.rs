//! Separable regularizers `Psi_i`, their proximal operators in the weighted
//! norm, the proximal step `T(x)` and the proximal-gradient mapping.
//!
//! All regularizers act coordinate-wise with the same scalar parameters on
//! every coordinate of a block, so `prox` in `|.|_W` with `W_ii = w_i I`
//! reduces to a scalar problem
//!
//! ```text
//! min_u  psi(u) + w/2 (u - v)^2
//! ```
//!
//! For `psi(u) = lambda |u| + I_[lo, hi](u)` the minimizer is
//! `clamp(soft(v, lambda / w), lo, hi)`: the objective without the box is
//! convex in one variable with unconstrained minimizer `s = soft(v, lambda/w)`,
//! so it is nonincreasing left of `s` and nondecreasing right of it, and the
//! constrained minimizer over an interval is the point of the interval
//! closest to `s`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::problem::CompositeProblem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Regularizer {
    Zero,
    L1 { lambda: f64 },
    Box { lower: f64, upper: f64 },
    NonnegOrthant,
    L1Box { lambda: f64, lower: f64, upper: f64 },
}

/// `sign(v) max(|v| - t, 0)`; `|v| = t` maps to 0.
#[inline]
pub fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

impl Regularizer {
    pub fn validate(&self) -> Result<()> {
        let check_lambda = |l: f64| {
            if l >= 0.0 && l.is_finite() {
                Ok(())
            } else {
                Err(Error::input(format!("lambda must be finite and >= 0, got {l}")))
            }
        };
        let check_box = |lo: f64, hi: f64| {
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY
            {
                Err(Error::input(format!("invalid box [{lo}, {hi}]")))
            } else {
                Ok(())
            }
        };
        match *self {
            Regularizer::Zero | Regularizer::NonnegOrthant => Ok(()),
            Regularizer::L1 { lambda } => check_lambda(lambda),
            Regularizer::Box { lower, upper } => check_box(lower, upper),
            Regularizer::L1Box {
                lambda,
                lower,
                upper,
            } => {
                check_lambda(lambda)?;
                check_box(lower, upper)
            }
        }
    }

    fn bounds(&self) -> (f64, f64) {
        match *self {
            Regularizer::Box { lower, upper } | Regularizer::L1Box { lower, upper, .. } => {
                (lower, upper)
            }
            Regularizer::NonnegOrthant => (0.0, f64::INFINITY),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn lambda(&self) -> f64 {
        match *self {
            Regularizer::L1 { lambda } | Regularizer::L1Box { lambda, .. } => lambda,
            _ => 0.0,
        }
    }

    /// Whether `Psi` is an indicator-free function (finite everywhere).
    pub fn is_finite_everywhere(&self) -> bool {
        matches!(self, Regularizer::Zero | Regularizer::L1 { .. })
    }

    /// `psi(u)` for a single coordinate; `+inf` outside the domain.
    pub fn value_scalar(&self, u: f64) -> f64 {
        let (lo, hi) = self.bounds();
        if u < lo || u > hi {
            return f64::INFINITY;
        }
        let l = self.lambda();
        if l == 0.0 {
            0.0
        } else {
            l * u.abs()
        }
    }

    /// `Psi_i(x_i)`.
    pub fn value(&self, xi: &[f64]) -> f64 {
        xi.iter().map(|&u| self.value_scalar(u)).sum()
    }

    pub fn contains(&self, xi: &[f64]) -> bool {
        let (lo, hi) = self.bounds();
        xi.iter().all(|&u| u >= lo && u <= hi)
    }

    /// Euclidean projection of one coordinate onto `dom psi`.
    pub fn project_scalar(&self, u: f64) -> f64 {
        let (lo, hi) = self.bounds();
        u.clamp(lo, hi)
    }

    /// `argmin_u psi(u) + w/2 (u - v)^2`.
    pub fn prox_scalar(&self, v: f64, w: f64) -> f64 {
        debug_assert!(w > 0.0);
        let (lo, hi) = self.bounds();
        let l = self.lambda();
        let s = if l == 0.0 { v } else { soft_threshold(v, l / w) };
        s.clamp(lo, hi)
    }

    /// Blockwise prox with weight `w_i`.
    pub fn prox_block(&self, v: &[f64], w: f64, out: &mut [f64]) {
        for (o, &vi) in out.iter_mut().zip(v) {
            *o = self.prox_scalar(vi, w);
        }
    }
}

/// `T(x) = prox(x - W^{-1} grad f(x))` with the problem's weights.
pub fn proximal_step(problem: &CompositeProblem, x: &[f64]) -> Result<Vec<f64>> {
    let g = problem.full_gradient(x)?;
    Ok(proximal_step_from_gradient(problem, x, &g, problem.weights().diag()))
}

pub(crate) fn proximal_step_from_gradient(
    problem: &CompositeProblem,
    x: &[f64],
    grad: &[f64],
    weights: &[f64],
) -> Vec<f64> {
    let part = problem.partition();
    let mut t = vec![0.0; x.len()];
    for i in 0..part.num_blocks() {
        let w = weights[i];
        let reg = &problem.regularizers()[i];
        for c in part.range(i) {
            t[c] = reg.prox_scalar(x[c] - grad[c] / w, w);
        }
    }
    t
}

/// Proximal-gradient mapping `x - T(x)` and its W-norm.
pub fn prox_grad_mapping(problem: &CompositeProblem, x: &[f64]) -> Result<(Vec<f64>, f64)> {
    let t = proximal_step(problem, x)?;
    let d: Vec<f64> = x.iter().zip(&t).map(|(a, b)| a - b).collect();
    let nrm = problem.weights().norm(problem.partition(), &d);
    Ok((d, nrm))
}

/// Quadratic model `f(x) + <grad f(x), y - x> + 1/2 |y - x|_W^2 + Psi(y)`.
#[doc(hidden)]
pub fn model_value(problem: &CompositeProblem, x: &[f64], y: &[f64]) -> Result<f64> {
    let fx = problem.smooth_value(x)?;
    let g = problem.full_gradient(x)?;
    let d: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
    let w = problem.weights().norm_sq(problem.partition(), &d);
    Ok(fx + dot(&g, &d) + 0.5 * w + problem.regularizer_value(y)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::BlockPartition;
    use crate::smooth::SmoothComponent;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn soft_threshold_examples() {
        let r = Regularizer::L1 { lambda: 1.0 };
        assert_eq!(r.prox_scalar(5.0, 2.0), 4.5);
        assert_eq!(r.prox_scalar(0.3, 1.0), 0.0);
        assert_eq!(r.prox_scalar(-5.0, 2.0), -4.5);
        // tie at the threshold goes to zero
        assert_eq!(r.prox_scalar(0.5, 2.0), 0.0);
        assert_eq!(r.prox_scalar(-0.5, 2.0), 0.0);
    }

    #[test]
    fn box_clamps() {
        let r = Regularizer::Box {
            lower: 0.0,
            upper: 1.0,
        };
        for w in [0.1, 1.0, 7.0] {
            assert_eq!(r.prox_scalar(2.0, w), 1.0);
            assert_eq!(r.prox_scalar(-2.0, w), 0.0);
            assert_eq!(r.prox_scalar(0.25, w), 0.25);
        }
        assert_eq!(Regularizer::NonnegOrthant.prox_scalar(-3.0, 1.0), 0.0);
        assert_eq!(Regularizer::Zero.prox_scalar(-3.0, 1.0), -3.0);
    }

    #[test]
    fn l1_box_composition() {
        let r = Regularizer::L1Box {
            lambda: 1.0,
            lower: 0.5,
            upper: 2.0,
        };
        // soft(1.2, 1) = 0.2, clamped up to the lower bound
        assert_eq!(r.prox_scalar(1.2, 1.0), 0.5);
        assert_eq!(r.prox_scalar(10.0, 1.0), 2.0);
    }

    #[test]
    fn values_and_domain() {
        let r = Regularizer::Box {
            lower: -1.0,
            upper: 1.0,
        };
        assert_eq!(r.value(&[0.5, -1.0]), 0.0);
        assert_eq!(r.value(&[1.5]), f64::INFINITY);
        let r = Regularizer::L1Box {
            lambda: 2.0,
            lower: -1.0,
            upper: 1.0,
        };
        assert_eq!(r.value(&[0.5, -1.0]), 3.0);
    }

    #[test]
    fn validation() {
        assert!(Regularizer::L1 { lambda: -1.0 }.validate().is_err());
        assert!(Regularizer::Box {
            lower: 1.0,
            upper: 0.0
        }
        .validate()
        .is_err());
        assert!(Regularizer::Box {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY
        }
        .validate()
        .is_ok());
    }

    fn one_dim(coef: f64, reg: Regularizer) -> CompositeProblem {
        let p = BlockPartition::scalar(1).unwrap();
        let c = SmoothComponent::quadratic_residual(&p, &[(0, coef)], 0.0).unwrap();
        CompositeProblem::new(p, vec![c], vec![reg]).unwrap()
    }

    #[test]
    fn exact_step_for_matched_quadratic() {
        // f = 1/2 * 4 x^2 -> w = 4, T(1) = 0
        let prob = one_dim(2.0, Regularizer::Zero);
        assert_eq!(prob.weights().diag(), &[4.0]);
        assert_eq!(proximal_step(&prob, &[1.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn one_dim_lasso_step() {
        let prob = one_dim(1.0, Regularizer::L1 { lambda: 1.0 });
        assert_eq!(proximal_step(&prob, &[3.0]).unwrap(), vec![0.0]);
        let (d, n) = prox_grad_mapping(&prob, &[0.0]).unwrap();
        assert_eq!(d, vec![0.0]);
        assert_eq!(n, 0.0);
    }

    fn random_lasso(seed: u64) -> CompositeProblem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = BlockPartition::new(&[2, 1, 3]).unwrap();
        let mut comps = Vec::new();
        for _ in 0..5 {
            let mut row = Vec::new();
            for c in 0..6 {
                if rng.random::<f64>() < 0.6 {
                    row.push((c, rng.random_range(-2.0..2.0)));
                }
            }
            if let Ok(c) = SmoothComponent::quadratic_residual(&p, &row, rng.random_range(-1.0..1.0))
            {
                comps.push(c);
            }
        }
        // keep every block covered
        for c in 0..6 {
            comps.push(SmoothComponent::quadratic_residual(&p, &[(c, 0.5)], 0.1).unwrap());
        }
        let regs = vec![
            Regularizer::L1 { lambda: 0.3 },
            Regularizer::Box {
                lower: -0.5,
                upper: 0.5,
            },
            Regularizer::L1Box {
                lambda: 0.2,
                lower: -1.0,
                upper: 2.0,
            },
        ];
        CompositeProblem::new(p, comps, regs).unwrap()
    }

    #[test]
    fn nonexpansive_and_sufficient_decrease() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for seed in 0..10 {
            let prob = random_lasso(seed);
            let part = prob.partition();
            for _ in 0..50 {
                let x: Vec<f64> = (0..6).map(|_| rng.random_range(-3.0..3.0)).collect();
                let y: Vec<f64> = (0..6).map(|_| rng.random_range(-3.0..3.0)).collect();
                // prox nonexpansive in the W-norm
                let px: Vec<f64> = (0..6)
                    .map(|c| prob.regularizers()[part.block_of(c)].prox_scalar(x[c], prob.weights().diag()[part.block_of(c)]))
                    .collect();
                let py: Vec<f64> = (0..6)
                    .map(|c| prob.regularizers()[part.block_of(c)].prox_scalar(y[c], prob.weights().diag()[part.block_of(c)]))
                    .collect();
                let dp: Vec<f64> = px.iter().zip(&py).map(|(a, b)| a - b).collect();
                let dxy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
                let w = prob.weights();
                assert!(w.norm(part, &dp) <= w.norm(part, &dxy) * (1.0 + 1e-12));

                // sufficient decrease needs x in dom Psi
                let xf = prob.project(&x);
                let t = proximal_step(&prob, &xf).unwrap();
                let d: Vec<f64> = xf.iter().zip(&t).map(|(a, b)| a - b).collect();
                let lhs = prob.eval_objective(&xf).unwrap() - model_value(&prob, &xf, &t).unwrap();
                assert!(lhs >= 0.5 * w.norm_sq(part, &d) - 1e-10 * (1.0 + lhs.abs()));

                // mapping is 3-Lipschitz in the W-norm
                let yf = prob.project(&y);
                let (gx, _) = prox_grad_mapping(&prob, &xf).unwrap();
                let (gy, _) = prox_grad_mapping(&prob, &yf).unwrap();
                let dg: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a - b).collect();
                let dxy: Vec<f64> = xf.iter().zip(&yf).map(|(a, b)| a - b).collect();
                assert!(w.norm(part, &dg) <= 3.0 * w.norm(part, &dxy) + 1e-12);
            }
        }
    }
}
