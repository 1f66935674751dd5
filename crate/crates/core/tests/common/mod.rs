#![allow(dead_code)]

use prcd::harness::{
    build_lasso, generate_dual, generate_lasso, generate_logistic, CooMatrix, DualSpec, LassoSpec, LogisticSpec,
};
use prcd::CompositeProblem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn lasso(m: usize, n: usize, sparsity: f64, block_size: usize, bounds: Option<(f64, f64)>, seed: u64) -> CompositeProblem {
    let spec = LassoSpec {
        m,
        n,
        sparsity,
        lambda: 0.1,
        bounds,
        block_size,
        ..LassoSpec::default()
    };
    generate_lasso(&spec, seed).unwrap().problem
}

pub fn logistic(samples: usize, n: usize, sparsity: f64, block_size: usize, seed: u64) -> CompositeProblem {
    let spec = LogisticSpec {
        samples,
        n,
        sparsity,
        lambda: 0.01,
        block_size,
        ..LogisticSpec::default()
    };
    generate_logistic(&spec, seed).unwrap().problem
}

pub fn dual(components: usize, primal_block: usize, sigma: f64, seed: u64) -> CompositeProblem {
    let spec = DualSpec {
        components,
        primal_block,
        sigma,
    };
    generate_dual(&spec, seed).unwrap().problem
}

/// Twenty instances across the three families, all with `n <= 500`.
pub fn mixed_instances() -> Vec<(String, CompositeProblem)> {
    let mut out = Vec::new();
    let lassos = [
        (60, 50, 0.1, 1, None),
        (90, 100, 0.05, 1, None),
        (150, 120, 0.04, 2, None),
        (200, 300, 0.02, 1, Some((-0.5, 0.5))),
        (400, 500, 0.01, 1, None),
        (80, 60, 0.2, 3, Some((-1.0, 2.0))),
        (300, 240, 0.03, 4, None),
    ];
    for (k, &(m, n, s, bs, bounds)) in lassos.iter().enumerate() {
        out.push((format!("lasso{k}"), lasso(m, n, s, bs, bounds, 100 + k as u64)));
    }
    let logistics = [
        (60, 40, 0.2, 1),
        (100, 50, 0.1, 1),
        (200, 150, 0.05, 2),
        (300, 200, 0.03, 1),
        (120, 90, 0.1, 3),
        (400, 300, 0.02, 1),
        (50, 500, 0.01, 5),
    ];
    for (k, &(m, n, s, bs)) in logistics.iter().enumerate() {
        out.push((format!("logistic{k}"), logistic(m, n, s, bs, 200 + k as u64)));
    }
    let duals = [(10, 2, 1.0), (20, 1, 0.5), (40, 3, 2.0), (60, 2, 1.0), (100, 1, 4.0), (250, 2, 1.0)];
    for (k, &(c, mb, sigma)) in duals.iter().enumerate() {
        out.push((format!("dual{k}"), dual(c, mb, sigma, 300 + k as u64)));
    }
    out
}

/// `1/2 |A x - b|^2 + lambda |x|_1` where `A` stacks `alpha I` and the
/// disjoint pair rows `c_p (e_{2p} + e_{2p+1})`. Returns the problem and its
/// strong convexity modulus in `|.|_W`, `min_p alpha^2 / (alpha^2 + 2 c_p^2)`.
pub fn pair_quadratic(alpha: f64, pair_coef: &[f64], b: &[f64], lambda: f64) -> (CompositeProblem, f64) {
    let n = 2 * pair_coef.len();
    let mut entries: Vec<_> = (0..n).map(|i| (i, i, alpha)).collect();
    for (p, &c) in pair_coef.iter().enumerate() {
        entries.push((n + p, 2 * p, c));
        entries.push((n + p, 2 * p + 1, c));
    }
    let a = CooMatrix::new(n + pair_coef.len(), n, entries).unwrap();
    let problem = build_lasso(&a, b, lambda, None, 1).unwrap();
    let a2 = alpha * alpha;
    let sigma = pair_coef
        .iter()
        .map(|c| a2 / (a2 + 2.0 * c * c))
        .fold(f64::INFINITY, f64::min);
    (problem, sigma)
}

pub fn normal_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
