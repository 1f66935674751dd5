//! Block partition, incidence structure, weight matrix and the composite
//! objective `F = sum_j f_j + sum_i Psi_i`.

mod partition;
mod structure;

pub use partition::BlockPartition;
pub use structure::BipartiteStructure;

use crate::error::{Error, Result};
use crate::linalg::lambda_max_sym;
use crate::prox::Regularizer;
use crate::smooth::{BlockCurvature, SmoothComponent};

/// Block-diagonal `W` with `W_ii = w_i I`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    diag: Vec<f64>,
}

impl WeightMatrix {
    /// `w_i = sum_{j in N_bar_i} L_j`.
    pub fn from_structure(structure: &BipartiteStructure, lipschitz: &[f64]) -> Result<Self> {
        if lipschitz.len() != structure.num_components() {
            return Err(Error::input(format!(
                "{} Lipschitz constants for {} components",
                lipschitz.len(),
                structure.num_components()
            )));
        }
        if let Some((j, &l)) = lipschitz
            .iter()
            .enumerate()
            .find(|(_, l)| !(**l > 0.0) || !l.is_finite())
        {
            return Err(Error::NonPositiveLipschitz {
                component: j,
                value: l,
            });
        }
        let diag = (0..structure.num_blocks())
            .map(|i| {
                structure
                    .components_of(i)
                    .iter()
                    .map(|&j| lipschitz[j])
                    .sum::<f64>()
            })
            .collect::<Vec<_>>();
        if let Some(i) = diag.iter().position(|&w| w == 0.0) {
            return Err(Error::structure(format!(
                "block {i} is read by no smooth component"
            )));
        }
        Ok(Self { diag })
    }

    /// Arbitrary positive per-block weights.
    pub fn from_diag(diag: Vec<f64>) -> Result<Self> {
        if let Some(i) = diag.iter().position(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::input(format!("weight {i} must be positive, got {}", diag[i])));
        }
        Ok(Self { diag })
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.diag[i]
    }

    /// `|v|_W^2`.
    pub fn norm_sq(&self, partition: &BlockPartition, v: &[f64]) -> f64 {
        (0..partition.num_blocks())
            .map(|i| self.diag[i] * v[partition.range(i)].iter().map(|a| a * a).sum::<f64>())
            .sum()
    }

    pub fn norm(&self, partition: &BlockPartition, v: &[f64]) -> f64 {
        self.norm_sq(partition, v).sqrt()
    }

    /// `|v|_{W^-1}^2`.
    pub fn dual_norm_sq(&self, partition: &BlockPartition, v: &[f64]) -> f64 {
        (0..partition.num_blocks())
            .map(|i| v[partition.range(i)].iter().map(|a| a * a).sum::<f64>() / self.diag[i])
            .sum()
    }

    pub fn dual_norm(&self, partition: &BlockPartition, v: &[f64]) -> f64 {
        self.dual_norm_sq(partition, v).sqrt()
    }
}

/// Immutable composite problem. Safe to share across threads.
#[derive(Debug, Clone)]
pub struct CompositeProblem {
    partition: BlockPartition,
    structure: BipartiteStructure,
    smooth: Vec<SmoothComponent>,
    regularizers: Vec<Regularizer>,
    weights: WeightMatrix,
    /// Coordinate-wise block constants `L_i`, used by the reference mode.
    block_lipschitz: Vec<f64>,
    /// Offsets of each component's measurement cache in a flat buffer.
    cache_offsets: Vec<usize>,
}

impl CompositeProblem {
    pub fn new(
        partition: BlockPartition,
        smooth: Vec<SmoothComponent>,
        regularizers: Vec<Regularizer>,
    ) -> Result<Self> {
        let nb = partition.num_blocks();
        if smooth.is_empty() {
            return Err(Error::input("problem needs at least one smooth component"));
        }
        if regularizers.len() != nb {
            return Err(Error::input(format!(
                "{} regularizers for {nb} blocks",
                regularizers.len()
            )));
        }
        for r in &regularizers {
            r.validate()?;
        }
        for (j, c) in smooth.iter().enumerate() {
            if c.blocks().iter().any(|&b| b >= nb) {
                return Err(Error::input(format!("component {j} reads a block outside the partition")));
            }
            let expected: usize = c.blocks().iter().map(|&b| partition.block_size(b)).sum();
            if expected != c.local_dim() {
                return Err(Error::input(format!(
                    "component {j} was built for a different partition"
                )));
            }
        }
        let neigh: Vec<Vec<usize>> = smooth.iter().map(|c| c.blocks().to_vec()).collect();
        let structure = BipartiteStructure::from_neighbours(neigh, nb);
        let lipschitz: Vec<f64> = smooth.iter().map(SmoothComponent::lipschitz).collect();
        let weights = WeightMatrix::from_structure(&structure, &lipschitz)?;
        let block_lipschitz = block_constants(&partition, &structure, &smooth);
        let mut cache_offsets = Vec::with_capacity(smooth.len() + 1);
        cache_offsets.push(0);
        for c in &smooth {
            cache_offsets.push(cache_offsets.last().unwrap() + c.cache_dim());
        }
        Ok(Self {
            partition,
            structure,
            smooth,
            regularizers,
            weights,
            block_lipschitz,
            cache_offsets,
        })
    }

    /// Replace `W` by user-supplied positive block weights. The caller is
    /// responsible for the descent inequality holding with the new weights.
    pub fn with_weights(mut self, diag: Vec<f64>) -> Result<Self> {
        if diag.len() != self.num_blocks() {
            return Err(Error::input(format!(
                "{} weights for {} blocks",
                diag.len(),
                self.num_blocks()
            )));
        }
        self.weights = WeightMatrix::from_diag(diag)?;
        Ok(self)
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn structure(&self) -> &BipartiteStructure {
        &self.structure
    }

    pub fn components(&self) -> &[SmoothComponent] {
        &self.smooth
    }

    pub fn regularizers(&self) -> &[Regularizer] {
        &self.regularizers
    }

    pub fn weights(&self) -> &WeightMatrix {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.partition.dim()
    }

    pub fn num_blocks(&self) -> usize {
        self.partition.num_blocks()
    }

    pub fn num_components(&self) -> usize {
        self.smooth.len()
    }

    /// Coordinate-wise block constants `L_i`: the largest eigenvalue of the
    /// block Hessian bound summed over components reading block `i`.
    pub fn block_lipschitz(&self) -> &[f64] {
        &self.block_lipschitz
    }

    /// Reference-mode weights `min(omega, tau) L_i`.
    pub fn pcdm1_weights(&self, tau: usize) -> Vec<f64> {
        let beta = self.structure.omega().min(tau) as f64;
        self.block_lipschitz.iter().map(|l| beta * l).collect()
    }

    pub(crate) fn cache_offsets(&self) -> &[usize] {
        &self.cache_offsets
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::input(format!(
                "point has length {}, expected {}",
                x.len(),
                self.dim()
            )));
        }
        if let Some(c) = x.iter().position(|v| v.is_nan()) {
            return Err(Error::input(format!("coordinate {c} is NaN")));
        }
        Ok(())
    }

    /// Per-component values `f_j(x_{N_j})`.
    pub fn component_values(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        Ok(self.smooth.iter().map(|c| c.value(&self.partition, x)).collect())
    }

    /// `f(x)`.
    pub fn smooth_value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.component_values(x)?.iter().sum())
    }

    /// `Psi(x)`, `+inf` if an indicator is violated.
    pub fn regularizer_value(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok((0..self.num_blocks())
            .map(|i| self.regularizers[i].value(&x[self.partition.range(i)]))
            .sum())
    }

    /// `F(x)`; `+inf` outside `dom Psi`, error on NaN input.
    pub fn eval_objective(&self, x: &[f64]) -> Result<f64> {
        let psi = self.regularizer_value(x)?;
        if psi == f64::INFINITY {
            return Ok(psi);
        }
        Ok(self.smooth_value(x)? + psi)
    }

    /// `grad_i f(x) = sum_{j in N_bar_i} grad_i f_j(x_{N_j})`.
    pub fn partial_gradient(&self, x: &[f64], i: usize) -> Result<Vec<f64>> {
        self.check_point(x)?;
        if i >= self.num_blocks() {
            return Err(Error::input(format!("block {i} out of range")));
        }
        let mut out = vec![0.0; self.partition.block_size(i)];
        let mut z = Vec::new();
        let mut g = Vec::new();
        for (&j, &slot) in self
            .structure
            .components_of(i)
            .iter()
            .zip(self.structure.slots_of(i))
        {
            let c = &self.smooth[j];
            z.resize(c.cache_dim(), 0.0);
            g.resize(c.cache_dim(), 0.0);
            c.measure(&self.partition, x, &mut z);
            c.outer_gradient(&z, &mut g);
            c.accumulate_block_gradient(slot, &g, &mut out);
        }
        Ok(out)
    }

    /// Full gradient, one pass over the components.
    pub fn full_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let cache = self.measurements(x);
        Ok(self.gradient_from_cache(&cache))
    }

    /// All measurements `z_j = M_j^T x_{N_j}` in one flat buffer.
    pub(crate) fn measurements(&self, x: &[f64]) -> Vec<f64> {
        let mut cache = vec![0.0; *self.cache_offsets.last().unwrap()];
        for (j, c) in self.smooth.iter().enumerate() {
            let r = self.cache_offsets[j]..self.cache_offsets[j + 1];
            c.measure(&self.partition, x, &mut cache[r]);
        }
        cache
    }

    pub(crate) fn gradient_from_cache(&self, cache: &[f64]) -> Vec<f64> {
        let mut outer = vec![0.0; cache.len()];
        for (j, c) in self.smooth.iter().enumerate() {
            let r = self.cache_offsets[j]..self.cache_offsets[j + 1];
            c.outer_gradient(&cache[r.clone()], &mut outer[r]);
        }
        let mut grad = vec![0.0; self.dim()];
        for i in 0..self.num_blocks() {
            let out = &mut grad[self.partition.range(i)];
            self.block_gradient_from_outer(i, &outer, out);
        }
        grad
    }

    /// `grad_i f` given every component's `grad phi_j` in a flat buffer.
    pub(crate) fn block_gradient_from_outer(&self, i: usize, outer: &[f64], out: &mut [f64]) {
        for (&j, &slot) in self
            .structure
            .components_of(i)
            .iter()
            .zip(self.structure.slots_of(i))
        {
            let r = self.cache_offsets[j]..self.cache_offsets[j + 1];
            self.smooth[j].accumulate_block_gradient(slot, &outer[r], out);
        }
    }

    /// Blockwise projection onto `dom Psi`.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for i in 0..self.num_blocks() {
            let r = &self.regularizers[i];
            for v in &mut y[self.partition.range(i)] {
                *v = r.project_scalar(*v);
            }
        }
        y
    }

    /// Dense Hessian of `f` (row-major `n x n`) when every component is
    /// quadratic.
    pub fn dense_hessian(&self) -> Option<Vec<f64>> {
        let n = self.dim();
        let mut h = vec![0.0; n * n];
        for c in &self.smooth {
            let outer = c.outer_hessian()?;
            let d = c.cache_dim();
            // global coordinates of the local rows
            let coords: Vec<usize> = c
                .blocks()
                .iter()
                .flat_map(|&b| self.partition.range(b))
                .collect();
            let rows: Vec<&[f64]> = (0..c.blocks().len())
                .flat_map(|p| c.map_rows(p).chunks_exact(d))
                .collect();
            for (a, ra) in rows.iter().enumerate() {
                // ra^T H_phi
                let mut t = vec![0.0; d];
                for k in 0..d {
                    for l in 0..d {
                        t[l] += ra[k] * outer[k * d + l];
                    }
                }
                for (b, rb) in rows.iter().enumerate() {
                    let v: f64 = t.iter().zip(rb.iter()).map(|(p, q)| p * q).sum();
                    h[coords[a] * n + coords[b]] += v;
                }
            }
        }
        Some(h)
    }
}

fn block_constants(
    partition: &BlockPartition,
    structure: &BipartiteStructure,
    smooth: &[SmoothComponent],
) -> Vec<f64> {
    (0..partition.num_blocks())
        .map(|i| {
            let ni = partition.block_size(i);
            let mut gram = vec![0.0; ni * ni];
            let mut scalar = 0.0;
            for (&j, &slot) in structure.components_of(i).iter().zip(structure.slots_of(i)) {
                match smooth[j].block_curvature(slot) {
                    BlockCurvature::Rank1(a) => {
                        for r in 0..ni {
                            for c in 0..ni {
                                gram[r * ni + c] += a[r] * a[c];
                            }
                        }
                    }
                    BlockCurvature::Scalar(s) => scalar += s,
                }
            }
            lambda_max_sym(&gram, ni) + scalar
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn identity_lasso(lambda: f64) -> CompositeProblem {
        let p = BlockPartition::scalar(2).unwrap();
        let comps = (0..2)
            .map(|i| SmoothComponent::quadratic_residual(&p, &[(i, 1.0)], 0.0).unwrap())
            .collect();
        CompositeProblem::new(p, comps, vec![Regularizer::L1 { lambda }; 2]).unwrap()
    }

    #[test]
    fn weights_diagonal() {
        let s = BipartiteStructure::build(&[(0, 0), (1, 1)], 2, 2).unwrap();
        let w = WeightMatrix::from_structure(&s, &[4.0, 9.0]).unwrap();
        assert_eq!(w.diag(), &[4.0, 9.0]);
    }

    #[test]
    fn weights_shared_component() {
        let s = BipartiteStructure::build(&[(0, 0), (0, 1)], 2, 1).unwrap();
        let w = WeightMatrix::from_structure(&s, &[2.0]).unwrap();
        assert_eq!(w.diag(), &[2.0, 2.0]);
        let s = BipartiteStructure::build(&[(0, 0), (1, 0), (2, 0), (1, 1), (2, 1)], 2, 3).unwrap();
        let w = WeightMatrix::from_structure(&s, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(w.weight(0), 3.0);
    }

    #[test]
    fn weights_reject_nonpositive() {
        let s = BipartiteStructure::build(&[(0, 0), (1, 1)], 2, 2).unwrap();
        assert!(matches!(
            WeightMatrix::from_structure(&s, &[1.0, 0.0]),
            Err(Error::NonPositiveLipschitz { component: 1, .. })
        ));
    }

    #[test]
    fn uncovered_block_rejected() {
        let p = BlockPartition::scalar(2).unwrap();
        let c = SmoothComponent::quadratic_residual(&p, &[(0, 1.0)], 0.0).unwrap();
        let err = CompositeProblem::new(p, vec![c], vec![Regularizer::Zero; 2]).unwrap_err();
        assert!(matches!(err, Error::Structure(_)));
    }

    #[test]
    fn lasso_objective() {
        let prob = identity_lasso(1.0);
        assert_eq!(prob.eval_objective(&[1.0, -1.0]).unwrap(), 3.0);
    }

    #[test]
    fn indicator_violation_is_infinite() {
        let p = BlockPartition::scalar(1).unwrap();
        let c = SmoothComponent::quadratic_residual(&p, &[(0, 1.0)], 0.0).unwrap();
        let prob = CompositeProblem::new(
            p,
            vec![c],
            vec![Regularizer::Box {
                lower: 0.0,
                upper: 1.0,
            }],
        )
        .unwrap();
        assert_eq!(prob.eval_objective(&[2.0]).unwrap(), f64::INFINITY);
        assert!(matches!(prob.eval_objective(&[f64::NAN]), Err(Error::Input(_))));
    }

    #[test]
    fn partial_gradient_examples() {
        let prob = identity_lasso(0.0);
        assert_eq!(prob.partial_gradient(&[3.0, 5.0], 0).unwrap(), vec![3.0]);
        assert_eq!(prob.partial_gradient(&[0.0, 0.0], 1).unwrap(), vec![0.0]);

        let p = BlockPartition::scalar(2).unwrap();
        let c = SmoothComponent::logistic(&p, &[(0, 1.0)], 1.0, 4).unwrap();
        let c2 = SmoothComponent::logistic(&p, &[(1, 1.0)], 1.0, 4).unwrap();
        let prob = CompositeProblem::new(p, vec![c, c2], vec![Regularizer::Zero; 2]).unwrap();
        assert_eq!(prob.partial_gradient(&[0.0, 0.0], 0).unwrap(), vec![-1.0 / 8.0]);
    }

    fn random_problem(seed: u64) -> CompositeProblem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = BlockPartition::new(&[1, 2, 3, 1]).unwrap();
        let n = p.dim();
        let mut comps = Vec::new();
        for c in 0..n {
            comps.push(SmoothComponent::quadratic_residual(&p, &[(c, 1.0)], 0.0).unwrap());
        }
        for j in 0..6 {
            let mut row = Vec::new();
            for c in 0..n {
                if rng.random::<f64>() < 0.4 {
                    row.push((c, rng.random_range(-1.0..1.0)));
                }
            }
            if row.is_empty() {
                continue;
            }
            if j % 2 == 0 {
                comps.push(SmoothComponent::quadratic_residual(&p, &row, rng.random()).unwrap());
            } else {
                comps.push(SmoothComponent::logistic(&p, &row, 1.0, 6).unwrap());
            }
        }
        CompositeProblem::new(p, comps, vec![Regularizer::Zero; 4]).unwrap()
    }

    #[test]
    fn full_gradient_concatenates_partials() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for seed in 0..5 {
            let prob = random_problem(seed);
            let x: Vec<f64> = (0..prob.dim()).map(|_| rng.random_range(-2.0..2.0)).collect();
            let g = prob.full_gradient(&x).unwrap();
            for i in 0..prob.num_blocks() {
                let gi = prob.partial_gradient(&x, i).unwrap();
                for (a, b) in gi.iter().zip(&g[prob.partition().range(i)]) {
                    assert!((a - b).abs() <= 1e-14 * (1.0 + a.abs()));
                }
            }
        }
    }

    #[test]
    fn omega_bar_bounds_weights() {
        for seed in 0..5 {
            let prob = random_problem(seed);
            let lmax = prob
                .components()
                .iter()
                .map(|c| c.lipschitz())
                .fold(0.0, f64::max);
            let ob = prob.structure().omega_bar() as f64;
            assert!(prob.weights().diag().iter().all(|&w| w <= ob * lmax));
        }
    }

    #[test]
    fn locality_of_block_perturbation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let prob = random_problem(2);
        let x: Vec<f64> = (0..prob.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let base = prob.component_values(&x).unwrap();
        for i in 0..prob.num_blocks() {
            let mut y = x.clone();
            for c in prob.partition().range(i) {
                y[c] += 0.7;
            }
            let vals = prob.component_values(&y).unwrap();
            for j in 0..prob.num_components() {
                if !prob.structure().components_of(i).contains(&j) {
                    assert_eq!(vals[j], base[j]);
                }
            }
        }
    }

    #[test]
    fn diagonal_rows_make_pcdm1_match() {
        let prob = identity_lasso(0.5);
        assert_eq!(prob.structure().omega(), 1);
        assert_eq!(prob.pcdm1_weights(2), prob.weights().diag().to_vec());
    }

    #[test]
    fn hessian_of_quadratic() {
        let p = BlockPartition::scalar(2).unwrap();
        let c = SmoothComponent::quadratic_residual(&p, &[(0, 1.0), (1, 2.0)], 0.0).unwrap();
        let prob = CompositeProblem::new(p, vec![c], vec![Regularizer::Zero; 2]).unwrap();
        assert_eq!(prob.dense_hessian().unwrap(), vec![1.0, 2.0, 2.0, 4.0]);
    }

    #[test]
    fn override_weights() {
        let prob = identity_lasso(1.0).with_weights(vec![2.0, 3.0]).unwrap();
        assert_eq!(prob.weights().diag(), &[2.0, 3.0]);
        assert!(identity_lasso(1.0).with_weights(vec![0.0, 1.0]).is_err());
    }
}
