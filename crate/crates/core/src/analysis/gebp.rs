//! Empirical fit of the generalized error bound
//!
//! ```text
//! |x - x_bar|_W <= (kappa1 + kappa2 |x - x_bar|_W^2) |grad^+ F(x)|_W
//! ```
//!
//! Each sample `(d, g)` gives the linear constraint
//! `kappa1 g + kappa2 d^2 g >= d`. The fit minimizes `kappa1 + kappa2` over
//! the nonnegative quadrant. For fixed `kappa2` the best `kappa1` is
//! `max(0, max_s (d_s - kappa2 d_s^2 g_s) / g_s)`, so the objective is a
//! convex piecewise-linear function of `kappa2` whose minimum sits at
//! `kappa2 = 0`, at a zero crossing of one constraint line, or at the
//! intersection of two lines. All such candidates are enumerated.

use crate::error::{Error, Result};
use crate::problem::CompositeProblem;
use crate::prox::prox_grad_mapping;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GebpSample {
    /// `|x - x_bar|_W`.
    pub distance: f64,
    /// `|grad^+ F(x)|_W`.
    pub mapping_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GebpFit {
    pub kappa1: f64,
    pub kappa2: f64,
    /// `max_s d_s - (kappa1 + kappa2 d_s^2) g_s` over the samples used in the
    /// fit; nonpositive up to rounding for a feasible fit.
    pub max_violation: f64,
    /// Samples with a vanishing mapping but a positive distance. No finite
    /// constants cover them; they are excluded from the fit.
    pub counter_witnesses: Vec<usize>,
    pub samples: Vec<GebpSample>,
}

/// `max_s d_s - (kappa1 + kappa2 d_s^2) g_s`.
pub fn gebp_violation(samples: &[GebpSample], kappa1: f64, kappa2: f64) -> f64 {
    samples
        .iter()
        .map(|s| s.distance - (kappa1 + kappa2 * s.distance * s.distance) * s.mapping_norm)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Smallest `kappa1 + kappa2` satisfying every sample. `tol` is the distance
/// below which a sample with zero mapping norm counts as optimal.
pub fn fit_gebp(samples: &[GebpSample], tol: f64) -> Result<GebpFit> {
    for (s, x) in samples.iter().enumerate() {
        if !(x.distance >= 0.0) || !(x.mapping_norm >= 0.0) || !x.distance.is_finite() || !x.mapping_norm.is_finite() {
            return Err(Error::input(format!("sample {s} has invalid values {x:?}")));
        }
    }
    let mut witnesses = Vec::new();
    // (intercept a = d / g, slope b = d^2) of kappa1 >= a - b kappa2
    let mut lines = Vec::new();
    let mut used = Vec::new();
    for (s, x) in samples.iter().enumerate() {
        if x.mapping_norm == 0.0 {
            if x.distance > tol {
                witnesses.push(s);
            }
            continue;
        }
        used.push(*x);
        if x.distance > 0.0 {
            lines.push((x.distance / x.mapping_norm, x.distance * x.distance));
        }
    }
    let need = |k2: f64| {
        lines
            .iter()
            .map(|&(a, b)| a - b * k2)
            .fold(0.0f64, f64::max)
    };
    let mut candidates = vec![0.0];
    for (p, &(a, b)) in lines.iter().enumerate() {
        candidates.push(a / b);
        for &(a2, b2) in &lines[p + 1..] {
            if b != b2 {
                let k2 = (a - a2) / (b - b2);
                if k2 > 0.0 && k2.is_finite() {
                    candidates.push(k2);
                }
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for &k2 in &candidates {
        let k1 = need(k2);
        let obj = k1 + k2;
        // strict improvement keeps the smallest kappa2 on ties
        if obj < best.0 {
            best = (obj, k1, k2);
        }
    }
    let (_, kappa1, kappa2) = best;
    let max_violation = if used.is_empty() {
        0.0
    } else {
        gebp_violation(&used, kappa1, kappa2)
    };
    Ok(GebpFit {
        kappa1,
        kappa2,
        max_violation,
        counter_witnesses: witnesses,
        samples: samples.to_vec(),
    })
}

/// Evaluate `(d, g)` at each point and fit the constants. `projector` maps a
/// point to its W-projection onto the optimal set.
pub fn estimate_gebp_constants<F>(
    problem: &CompositeProblem,
    projector: F,
    points: &[Vec<f64>],
) -> Result<GebpFit>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let part = problem.partition();
    let w = problem.weights();
    let mut samples = Vec::with_capacity(points.len());
    for x in points {
        let bar = projector(x);
        if bar.len() != x.len() {
            return Err(Error::input("projector returned a point of the wrong length"));
        }
        let diff: Vec<f64> = x.iter().zip(&bar).map(|(a, b)| a - b).collect();
        let (_, g) = prox_grad_mapping(problem, x)?;
        samples.push(GebpSample {
            distance: w.norm(part, &diff),
            mapping_norm: g,
        });
    }
    fit_gebp(&samples, 1e-12)
}
