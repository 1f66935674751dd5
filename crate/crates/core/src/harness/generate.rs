//! Random problem generators and builders from explicit data.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::matrix_io::CooMatrix;
use crate::error::{Error, Result};
use crate::problem::{BlockPartition, CompositeProblem};
use crate::prox::Regularizer;
use crate::smooth::SmoothComponent;

/// A generated problem together with its raw data.
#[derive(Debug, Clone)]
pub struct GeneratedProblem {
    pub problem: CompositeProblem,
    pub matrix: CooMatrix,
    /// Right-hand side (lasso, dual) or labels (logistic).
    pub rhs: Vec<f64>,
    /// Planted solution or separator, if any.
    pub planted: Option<Vec<f64>>,
}

impl GeneratedProblem {
    pub fn omega(&self) -> usize {
        self.problem.structure().omega()
    }

    pub fn omega_bar(&self) -> usize {
        self.problem.structure().omega_bar()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LassoSpec {
    pub m: usize,
    pub n: usize,
    /// Expected fraction of nonzeros per row.
    pub sparsity: f64,
    pub lambda: f64,
    /// Optional box `[lower, upper]` on every coordinate.
    pub bounds: Option<(f64, f64)>,
    pub block_size: usize,
    /// Extra rows, each touching `linking_width` random columns.
    pub linking_rows: usize,
    pub linking_width: usize,
    /// Fraction of nonzeros in the planted solution.
    pub planted_density: f64,
    /// Standard deviation of the noise added to `b`.
    pub noise: f64,
}

impl Default for LassoSpec {
    fn default() -> Self {
        Self {
            m: 90,
            n: 100,
            sparsity: 0.05,
            lambda: 0.1,
            bounds: None,
            block_size: 1,
            linking_rows: 0,
            linking_width: 0,
            planted_density: 0.1,
            noise: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticSpec {
    pub samples: usize,
    pub n: usize,
    pub sparsity: f64,
    pub lambda: f64,
    pub block_size: usize,
    /// Probability of flipping each planted label.
    pub flip_probability: f64,
}

impl Default for LogisticSpec {
    fn default() -> Self {
        Self {
            samples: 100,
            n: 50,
            sparsity: 0.1,
            lambda: 0.01,
            block_size: 1,
            flip_probability: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DualSpec {
    /// Number of primal blocks `N_bar`, which is also the number of
    /// constraint rows in the column-linked block-angular pattern.
    pub components: usize,
    /// Size `m_j` of every primal block.
    pub primal_block: usize,
    pub sigma: f64,
}

impl Default for DualSpec {
    fn default() -> Self {
        Self {
            components: 20,
            primal_block: 1,
            sigma: 1.0,
        }
    }
}

fn check_sparsity(n: usize, sparsity: f64) -> Result<()> {
    if !(sparsity > 0.0 && sparsity <= 1.0) {
        return Err(Error::input(format!("sparsity must lie in (0, 1], got {sparsity}")));
    }
    if (n as f64) * sparsity < 1.0 {
        return Err(Error::input(format!(
            "sparsity {sparsity} gives fewer than one expected nonzero per row (n = {n})"
        )));
    }
    Ok(())
}

/// Random sparse rows with a Binomial(n, sparsity) count (redrawn while 0)
/// and standard normal values. Every column is forced to be nonzero.
fn sparse_rows(rng: &mut ChaCha8Rng, m: usize, n: usize, sparsity: f64) -> Result<Vec<Vec<(usize, f64)>>> {
    let count = Binomial::new(n as u64, sparsity).map_err(|e| Error::input(e.to_string()))?;
    let mut rows = Vec::with_capacity(m);
    for _ in 0..m {
        let mut k = 0;
        while k == 0 {
            k = count.sample(rng) as usize;
        }
        let mut cols = sample(rng, n, k).into_vec();
        cols.sort_unstable();
        rows.push(
            cols.into_iter()
                .map(|c| (c, rng.sample::<f64, _>(StandardNormal)))
                .collect::<Vec<_>>(),
        );
    }
    let mut covered = vec![false; n];
    for r in &rows {
        for &(c, _) in r {
            covered[c] = true;
        }
    }
    for c in 0..n {
        if !covered[c] && m > 0 {
            let r = rng.random_range(0..m);
            rows[r].push((c, rng.sample::<f64, _>(StandardNormal)));
            rows[r].sort_by_key(|e| e.0);
        }
    }
    Ok(rows)
}

fn planted(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Vec<f64> {
    let k = ((n as f64 * density).round() as usize).clamp(1, n);
    let mut x = vec![0.0; n];
    for c in sample(rng, n, k) {
        x[c] = rng.sample(StandardNormal);
    }
    x
}

fn to_coo(rows: &[Vec<(usize, f64)>], cols: usize) -> Result<CooMatrix> {
    let entries = rows
        .iter()
        .enumerate()
        .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
        .collect();
    CooMatrix::new(rows.len(), cols, entries)
}

fn lasso_regularizer(lambda: f64, bounds: Option<(f64, f64)>) -> Regularizer {
    match (lambda, bounds) {
        (l, None) if l == 0.0 => Regularizer::Zero,
        (l, None) => Regularizer::L1 { lambda: l },
        (l, Some((lower, upper))) if l == 0.0 => Regularizer::Box { lower, upper },
        (l, Some((lower, upper))) => Regularizer::L1Box {
            lambda: l,
            lower,
            upper,
        },
    }
}

/// `F(x) = 1/2 |A x - b|^2 + lambda |x|_1 (+ box)`. Empty rows of `A` are
/// dropped; every column must be nonzero.
pub fn build_lasso(
    a: &CooMatrix,
    b: &[f64],
    lambda: f64,
    bounds: Option<(f64, f64)>,
    block_size: usize,
) -> Result<CompositeProblem> {
    if b.len() != a.rows {
        return Err(Error::input(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            a.rows
        )));
    }
    let part = BlockPartition::uniform(a.cols, block_size)?;
    let reg = lasso_regularizer(lambda, bounds);
    let mut comps = Vec::with_capacity(a.rows);
    for (r, row) in a.row_lists().iter().enumerate() {
        if row.iter().all(|e| e.1 == 0.0) {
            continue;
        }
        comps.push(SmoothComponent::quadratic_residual(&part, row, b[r]).map_err(|e| e.at_component(r))?);
    }
    let nb = part.num_blocks();
    CompositeProblem::new(part, comps, vec![reg; nb])
}

pub fn generate_lasso(spec: &LassoSpec, seed: u64) -> Result<GeneratedProblem> {
    if spec.m == 0 || spec.n == 0 {
        return Err(Error::input("m and n must be at least 1"));
    }
    check_sparsity(spec.n, spec.sparsity)?;
    if spec.linking_rows > 0 && !(1..=spec.n).contains(&spec.linking_width) {
        return Err(Error::input(format!(
            "linking width must lie in [1, {}], got {}",
            spec.n, spec.linking_width
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = sparse_rows(&mut rng, spec.m, spec.n, spec.sparsity)?;
    for _ in 0..spec.linking_rows {
        let mut cols = sample(&mut rng, spec.n, spec.linking_width).into_vec();
        cols.sort_unstable();
        rows.push(cols.into_iter().map(|c| (c, rng.sample(StandardNormal))).collect());
    }
    let mut x = planted(&mut rng, spec.n, spec.planted_density);
    if let Some((lo, hi)) = spec.bounds {
        x.iter_mut().for_each(|v| *v = v.clamp(lo, hi));
    }
    let matrix = to_coo(&rows, spec.n)?;
    let mut b = matrix.matvec(&x);
    for v in &mut b {
        *v += spec.noise * rng.sample::<f64, _>(StandardNormal);
    }
    let problem = build_lasso(&matrix, &b, spec.lambda, spec.bounds, spec.block_size)?;
    Ok(GeneratedProblem {
        problem,
        matrix,
        rhs: b,
        planted: Some(x),
    })
}

/// Averaged logistic loss plus `lambda |x|_1` from samples (rows of `a`) and
/// labels in `{-1, +1}`.
pub fn build_logistic(
    a: &CooMatrix,
    labels: &[f64],
    lambda: f64,
    block_size: usize,
) -> Result<CompositeProblem> {
    if labels.len() != a.rows {
        return Err(Error::input(format!(
            "{} labels for {} samples",
            labels.len(),
            a.rows
        )));
    }
    let part = BlockPartition::uniform(a.cols, block_size)?;
    let rows: Vec<_> = a
        .row_lists()
        .into_iter()
        .zip(labels)
        .enumerate()
        .filter(|(_, (row, _))| row.iter().any(|e| e.1 != 0.0))
        .collect();
    let total = rows.len();
    let mut comps = Vec::with_capacity(total);
    for (r, (row, &label)) in rows {
        comps.push(SmoothComponent::logistic(&part, &row, label, total).map_err(|e| e.at_component(r))?);
    }
    let nb = part.num_blocks();
    CompositeProblem::new(part, comps, vec![lasso_regularizer(lambda, None); nb])
}

pub fn generate_logistic(spec: &LogisticSpec, seed: u64) -> Result<GeneratedProblem> {
    if spec.samples == 0 || spec.n == 0 {
        return Err(Error::input("sample count and n must be at least 1"));
    }
    check_sparsity(spec.n, spec.sparsity)?;
    if !(0.0..=1.0).contains(&spec.flip_probability) {
        return Err(Error::input("flip probability must lie in [0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = sparse_rows(&mut rng, spec.samples, spec.n, spec.sparsity)?;
    let sep: Vec<f64> = (0..spec.n).map(|_| rng.sample(StandardNormal)).collect();
    let matrix = to_coo(&rows, spec.n)?;
    let labels: Vec<f64> = matrix
        .matvec(&sep)
        .into_iter()
        .map(|z| {
            let y = if z >= 0.0 { 1.0 } else { -1.0 };
            if rng.random::<f64>() < spec.flip_probability {
                -y
            } else {
                y
            }
        })
        .collect();
    let problem = build_logistic(&matrix, &labels, spec.lambda, spec.block_size)?;
    Ok(GeneratedProblem {
        problem,
        matrix,
        rhs: labels,
        planted: Some(sep),
    })
}

/// Dual of `min sum_j sigma_j/2 |u_j - c_j|^2  s.t.  A u <= b` over the
/// multipliers `x >= 0` (scalar blocks, one per row of `A`).
///
/// `column_blocks[j]` is the width `m_j` of primal block `j`. Each `b_i` is
/// attached to the lowest-indexed component reading row `i`.
pub fn build_dual(
    a: &CooMatrix,
    column_blocks: &[usize],
    sigma: &[f64],
    center: &[f64],
    b: &[f64],
) -> Result<CompositeProblem> {
    let nbar = column_blocks.len();
    if sigma.len() != nbar {
        return Err(Error::input(format!("{} sigmas for {nbar} components", sigma.len())));
    }
    if column_blocks.iter().sum::<usize>() != a.cols || center.len() != a.cols {
        return Err(Error::input("primal block sizes and centers must match the column count of A"));
    }
    if b.len() != a.rows {
        return Err(Error::input(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            a.rows
        )));
    }
    let mut col_offsets = vec![0];
    for &s in column_blocks {
        col_offsets.push(col_offsets.last().unwrap() + s);
    }
    let comp_of = |c: usize| col_offsets.partition_point(|&o| o <= c) - 1;
    let mut cols: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); nbar];
    for &(r, c, v) in &a.entries {
        let j = comp_of(c);
        cols[j].push((r, c - col_offsets[j], v));
    }
    let mut owner = vec![usize::MAX; a.rows];
    for (j, col) in cols.iter().enumerate() {
        for &(r, _, v) in col {
            if v != 0.0 && owner[r] > j {
                owner[r] = j;
            }
        }
    }
    let part = BlockPartition::scalar(a.rows)?;
    let mut comps = Vec::with_capacity(nbar);
    for j in 0..nbar {
        let bbar: Vec<(usize, f64)> = (0..a.rows).filter(|&r| owner[r] == j).map(|r| (r, b[r])).collect();
        let c = &center[col_offsets[j]..col_offsets[j + 1]];
        comps.push(
            SmoothComponent::quadratic_conjugate_dual(&part, &cols[j], &bbar, sigma[j], c)
                .map_err(|e| e.at_component(j))?,
        );
    }
    CompositeProblem::new(part, comps, vec![Regularizer::NonnegOrthant; a.rows])
}

/// Random column-linked block-angular instance: component 0 reads every
/// row, component `j >= 1` reads row `j` only.
pub fn generate_dual(spec: &DualSpec, seed: u64) -> Result<GeneratedProblem> {
    let nbar = spec.components;
    if nbar == 0 || spec.primal_block == 0 {
        return Err(Error::input("need at least one component of positive width"));
    }
    if !(spec.sigma > 0.0) {
        return Err(Error::input(format!("sigma must be positive, got {}", spec.sigma)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mb = spec.primal_block;
    let mut entries = Vec::new();
    for r in 0..nbar {
        for k in 0..mb {
            entries.push((r, k, rng.sample::<f64, _>(StandardNormal)));
        }
        if r > 0 {
            for k in 0..mb {
                entries.push((r, r * mb + k, rng.sample::<f64, _>(StandardNormal)));
            }
        }
    }
    let matrix = CooMatrix::new(nbar, nbar * mb, entries)?;
    // u = 0 is strictly feasible because b > 0; scaled centers make some
    // constraints active at the optimum
    let b: Vec<f64> = (0..nbar).map(|_| rng.random_range(0.5..1.5)).collect();
    let center: Vec<f64> = (0..nbar * mb)
        .map(|_| 2.0 * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let problem = build_dual(&matrix, &vec![mb; nbar], &vec![spec.sigma; nbar], &center, &b)?;
    Ok(GeneratedProblem {
        problem,
        matrix,
        rhs: b,
        planted: Some(center),
    })
}

/// `f(x) = 1/2 (x_1 - x_2)^2 + x_1 + x_2` on the nonnegative orthant with
/// `W = I`, written as a single dual component (`A = (1, -1)^T`, `sigma = 1`,
/// `c = 0`, `b = (1, 1)`). Its optimal set is `{0}`, yet along `x = (t, t)`
/// the mapping stays at `(1, 1)` while the distance grows like `t`, so no
/// classical error bound holds.
pub fn error_bound_counterexample() -> Result<CompositeProblem> {
    let a = CooMatrix::new(2, 1, vec![(0, 0, 1.0), (1, 0, -1.0)])?;
    build_dual(&a, &[1], &[1.0], &[0.0], &[1.0, 1.0])?.with_weights(vec![1.0, 1.0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_lasso_structure() {
        let spec = LassoSpec {
            m: 6,
            n: 5,
            sparsity: 1.0,
            ..LassoSpec::default()
        };
        let g = generate_lasso(&spec, 1).unwrap();
        assert_eq!(g.omega(), 5);
        assert_eq!(g.omega_bar(), 6);
    }

    #[test]
    fn diagonal_lasso_structure() {
        let a = CooMatrix::new(4, 4, (0..4).map(|i| (i, i, 1.0 + i as f64)).collect()).unwrap();
        let p = build_lasso(&a, &[0.0; 4], 0.1, None, 1).unwrap();
        assert_eq!((p.structure().omega(), p.structure().omega_bar()), (1, 1));
    }

    #[test]
    fn infeasible_sparsity() {
        let spec = LassoSpec {
            n: 10,
            sparsity: 0.05,
            ..LassoSpec::default()
        };
        assert!(matches!(generate_lasso(&spec, 0), Err(Error::Input(_))));
    }

    #[test]
    fn generated_rows_and_columns_nonzero() {
        for seed in 0..5 {
            let spec = LassoSpec {
                m: 40,
                n: 60,
                sparsity: 1.0 / 60.0,
                ..LassoSpec::default()
            };
            let g = generate_lasso(&spec, seed).unwrap();
            assert_eq!(g.problem.num_components(), 40);
            assert!(g.problem.structure().uncovered_blocks().is_empty());
        }
    }

    #[test]
    fn zero_rows_dropped_on_ingest() {
        let a = CooMatrix::new(3, 2, vec![(0, 0, 1.0), (2, 1, 2.0)]).unwrap();
        let p = build_lasso(&a, &[1.0, 2.0, 3.0], 0.0, None, 1).unwrap();
        assert_eq!(p.num_components(), 2);
    }

    #[test]
    fn logistic_single_sample() {
        let a = CooMatrix::new(1, 1, vec![(0, 0, 1.0)]).unwrap();
        let p = build_logistic(&a, &[1.0], 0.0, 1).unwrap();
        assert_eq!(p.structure().omega(), 1);
        assert_eq!(p.regularizers()[0], Regularizer::Zero);
    }

    #[test]
    fn logistic_weights_from_raw_samples() {
        let spec = LogisticSpec::default();
        let g = generate_logistic(&spec, 3).unwrap();
        let nbar = g.matrix.rows as f64;
        let mut w = vec![0.0; spec.n];
        for row in g.matrix.row_lists() {
            let l: f64 = row.iter().map(|e| e.1 * e.1).sum::<f64>() / 4.0 / nbar;
            for &(c, _) in &row {
                w[c] += l;
            }
        }
        for (a, b) in w.iter().zip(g.problem.weights().diag()) {
            assert!((a - b).abs() <= 1e-12 * a);
        }
    }

    #[test]
    fn dual_block_angular_measures() {
        let g = generate_dual(
            &DualSpec {
                components: 7,
                ..DualSpec::default()
            },
            2,
        )
        .unwrap();
        assert_eq!(g.omega(), 7);
        assert_eq!(g.omega_bar(), 2);
    }

    #[test]
    fn dual_sigma_scales_constants() {
        let g1 = generate_dual(&DualSpec { components: 5, primal_block: 2, sigma: 1.0 }, 4).unwrap();
        let g2 = generate_dual(&DualSpec { components: 5, primal_block: 2, sigma: 4.0 }, 4).unwrap();
        for (a, b) in g1.problem.components().iter().zip(g2.problem.components()) {
            assert!((a.lipschitz() / 4.0 - b.lipschitz()).abs() <= 1e-12 * a.lipschitz());
        }
    }

    #[test]
    fn counterexample_values() {
        let p = error_bound_counterexample().unwrap();
        for t in [1.0, 2.5, 40.0] {
            assert_eq!(p.eval_objective(&[t, t]).unwrap(), 2.0 * t);
            assert_eq!(p.full_gradient(&[t, t]).unwrap(), vec![1.0, 1.0]);
        }
        assert_eq!(p.eval_objective(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn same_seed_same_instance() {
        let a = generate_lasso(&LassoSpec::default(), 9).unwrap();
        let b = generate_lasso(&LassoSpec::default(), 9).unwrap();
        assert_eq!(a.matrix, b.matrix);
        assert_eq!(a.rhs, b.rhs);
    }
}
