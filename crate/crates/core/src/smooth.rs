//! Smooth component families `f_j`.
//!
//! Every supported component is a scalar function of a few linear
//! measurements of its local variables:
//!
//! ```text
//! f_j(x_{N_j}) = phi_j(M_j^T x_{N_j})
//! ```
//!
//! with `M_j` a dense `local_dim x cache_dim` matrix. The solver caches
//! `z_j = M_j^T x_{N_j}` and updates it with rank-one style corrections when a
//! block moves, which is what makes a coordinate step cost `O(|N_bar_i|)`
//! instead of a full pass.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm_sq, spectral_norm_sq};
use crate::problem::BlockPartition;

/// Kind-specific scalar part `phi_j` of a component.
#[derive(Debug, Clone, PartialEq)]
pub enum SmoothKind {
    /// `phi(z) = (z - target)^2 / 2`
    QuadraticResidual { target: f64 },
    /// `phi(z) = scale * log(1 + exp(-label * z))`
    Logistic { label: f64, scale: f64 },
    /// `phi(z, l) = |z|^2 / (2 sigma) - <center, z> + l`, the conjugate of
    /// `g(u) = sigma/2 |u - center|^2` evaluated at `-A^T x`, plus the linear
    /// dual term `l = <x, b_bar>`.
    QuadraticConjugateDual { sigma: f64, center: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct SmoothComponent {
    kind: SmoothKind,
    blocks: Vec<usize>,
    /// Prefix offsets of each block of `N_j` inside the local vector.
    local_offsets: Vec<usize>,
    /// Row-major `local_dim x cache_dim`.
    map: Vec<f64>,
    cache_dim: usize,
    lipschitz: f64,
}

/// Group global `(coordinate, value)` entries by block and return the sorted
/// block list with its local offsets.
fn local_layout(
    partition: &BlockPartition,
    coords: impl Iterator<Item = usize>,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = partition.dim();
    let mut blocks = Vec::new();
    for c in coords {
        if c >= n {
            return Err(Error::input(format!("coordinate {c} out of range (n = {n})")));
        }
        blocks.push(partition.block_of(c));
    }
    blocks.sort_unstable();
    blocks.dedup();
    let mut offsets = Vec::with_capacity(blocks.len() + 1);
    offsets.push(0);
    for &b in &blocks {
        offsets.push(offsets.last().unwrap() + partition.block_size(b));
    }
    Ok((blocks, offsets))
}

/// Position of global coordinate `c` inside the local vector.
fn local_index(partition: &BlockPartition, blocks: &[usize], offsets: &[usize], c: usize) -> usize {
    let b = partition.block_of(c);
    let p = blocks.binary_search(&b).expect("block registered in layout");
    offsets[p] + (c - partition.offsets()[b])
}

fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

impl SmoothComponent {
    /// `f_j(x) = (a^T x - b)^2 / 2` with `L = |a|^2`. `row` holds global
    /// `(coordinate, value)` pairs; explicit zeros are dropped.
    pub fn quadratic_residual(
        partition: &BlockPartition,
        row: &[(usize, f64)],
        target: f64,
    ) -> Result<Self> {
        let entries: Vec<_> = row.iter().copied().filter(|&(_, v)| v != 0.0).collect();
        if entries.is_empty() {
            // the caller relabels the component index via `Error::at_component`
            return Err(Error::NonPositiveLipschitz {
                component: 0,
                value: 0.0,
            });
        }
        let (blocks, offsets) = local_layout(partition, entries.iter().map(|e| e.0))?;
        let mut map = vec![0.0; *offsets.last().unwrap()];
        for &(c, v) in &entries {
            map[local_index(partition, &blocks, &offsets, c)] += v;
        }
        let lipschitz = norm_sq(&map);
        Ok(Self {
            kind: SmoothKind::QuadraticResidual { target },
            blocks,
            local_offsets: offsets,
            map,
            cache_dim: 1,
            lipschitz,
        })
    }

    /// Averaged logistic loss of one sample,
    /// `f_j(x) = log(1 + exp(-label <a, x>)) / num_samples`, with
    /// `L = |a|^2 / (4 num_samples)`.
    pub fn logistic(
        partition: &BlockPartition,
        sample: &[(usize, f64)],
        label: f64,
        num_samples: usize,
    ) -> Result<Self> {
        if label != 1.0 && label != -1.0 {
            return Err(Error::input(format!("logistic label must be +1 or -1, got {label}")));
        }
        if num_samples == 0 {
            return Err(Error::input("logistic sample count must be positive"));
        }
        let mut c = Self::quadratic_residual(partition, sample, 0.0)?;
        let scale = 1.0 / num_samples as f64;
        c.kind = SmoothKind::Logistic { label, scale };
        c.lipschitz = scale * norm_sq(&c.map) / 4.0;
        Ok(c)
    }

    /// Dual-decomposition component for the primal term
    /// `g(u) = sigma/2 |u - center|^2`, `u in R^{m_j}`:
    ///
    /// `f_j(x) = g*(-A_j^T x) + <x, b_bar>`, `L = |A_j|_2^2 / sigma`.
    ///
    /// `column_block` holds `(coordinate, column, value)` entries of the
    /// `n x m_j` block column `A_j`; `b_bar` holds `(coordinate, value)`
    /// entries of this component's share of the right-hand side.
    pub fn quadratic_conjugate_dual(
        partition: &BlockPartition,
        column_block: &[(usize, usize, f64)],
        b_bar: &[(usize, f64)],
        sigma: f64,
        center: &[f64],
    ) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::input(format!("sigma must be positive, got {sigma}")));
        }
        let m = center.len();
        if m == 0 {
            return Err(Error::input("dual component needs at least one primal variable"));
        }
        if let Some(&(_, k, _)) = column_block.iter().find(|e| e.1 >= m) {
            return Err(Error::input(format!("column {k} out of range (m_j = {m})")));
        }
        let (blocks, offsets) = local_layout(
            partition,
            column_block
                .iter()
                .filter(|e| e.2 != 0.0)
                .map(|e| e.0)
                .chain(b_bar.iter().filter(|e| e.1 != 0.0).map(|e| e.0)),
        )?;
        let local_dim = *offsets.last().unwrap();
        let cache_dim = m + 1;
        let mut map = vec![0.0; local_dim * cache_dim];
        for &(c, k, v) in column_block.iter().filter(|e| e.2 != 0.0) {
            map[local_index(partition, &blocks, &offsets, c) * cache_dim + k] += v;
        }
        for &(c, v) in b_bar.iter().filter(|e| e.1 != 0.0) {
            map[local_index(partition, &blocks, &offsets, c) * cache_dim + m] += v;
        }
        let a_local: Vec<f64> = (0..local_dim)
            .flat_map(|r| map[r * cache_dim..r * cache_dim + m].to_vec())
            .collect();
        let lipschitz = spectral_norm_sq(&a_local, local_dim, m) / sigma;
        if !(lipschitz > 0.0) {
            return Err(Error::NonPositiveLipschitz {
                component: 0,
                value: lipschitz,
            });
        }
        Ok(Self {
            kind: SmoothKind::QuadraticConjugateDual {
                sigma,
                center: center.to_vec(),
            },
            blocks,
            local_offsets: offsets,
            map,
            cache_dim,
            lipschitz,
        })
    }

    pub fn kind(&self) -> &SmoothKind {
        &self.kind
    }

    /// Sorted block set `N_j`.
    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    /// `L_{N_j}`.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn cache_dim(&self) -> usize {
        self.cache_dim
    }

    pub fn local_dim(&self) -> usize {
        *self.local_offsets.last().unwrap()
    }

    /// Whether `phi` is quadratic (so `f_j` has a constant Hessian).
    pub fn is_quadratic(&self) -> bool {
        !matches!(self.kind, SmoothKind::Logistic { .. })
    }

    /// Rows of `M_j` belonging to the block at position `slot` of `N_j`.
    fn slot_rows(&self, slot: usize) -> &[f64] {
        let lo = self.local_offsets[slot] * self.cache_dim;
        let hi = self.local_offsets[slot + 1] * self.cache_dim;
        &self.map[lo..hi]
    }

    /// `z = M_j^T x_{N_j}` read directly from the global vector.
    pub fn measure(&self, partition: &BlockPartition, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (p, &b) in self.blocks.iter().enumerate() {
            let xb = &x[partition.range(b)];
            for (r, chunk) in self.slot_rows(p).chunks_exact(self.cache_dim).enumerate() {
                let xv = xb[r];
                if xv != 0.0 {
                    for (o, m) in out.iter_mut().zip(chunk) {
                        *o += m * xv;
                    }
                }
            }
        }
    }

    /// `phi_j(z)`.
    pub fn value_at(&self, z: &[f64]) -> f64 {
        match &self.kind {
            SmoothKind::QuadraticResidual { target } => {
                let r = z[0] - target;
                0.5 * r * r
            }
            SmoothKind::Logistic { label, scale } => scale * softplus(-label * z[0]),
            SmoothKind::QuadraticConjugateDual { sigma, center } => {
                let m = center.len();
                norm_sq(&z[..m]) / (2.0 * sigma) - dot(center, &z[..m]) + z[m]
            }
        }
    }

    /// `grad phi_j(z)` written into `out` (length `cache_dim`).
    pub fn outer_gradient(&self, z: &[f64], out: &mut [f64]) {
        match &self.kind {
            SmoothKind::QuadraticResidual { target } => out[0] = z[0] - target,
            SmoothKind::Logistic { label, scale } => {
                out[0] = -scale * label * sigmoid(-label * z[0]);
            }
            SmoothKind::QuadraticConjugateDual { sigma, center } => {
                let m = center.len();
                for k in 0..m {
                    out[k] = z[k] / sigma - center[k];
                }
                out[m] = 1.0;
            }
        }
    }

    /// `out += M_{j,slot} g` where `g = grad phi_j(z)`: the contribution of
    /// this component to the partial gradient of the block at `slot`.
    pub fn accumulate_block_gradient(&self, slot: usize, outer: &[f64], out: &mut [f64]) {
        for (o, chunk) in out.iter_mut().zip(self.slot_rows(slot).chunks_exact(self.cache_dim)) {
            *o += dot(chunk, outer);
        }
    }

    /// `out = M_{j,slot}^T dx`: the change of `z_j` when the block at `slot`
    /// moves by `dx`.
    pub fn measure_delta(&self, slot: usize, dx: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (chunk, &d) in self.slot_rows(slot).chunks_exact(self.cache_dim).zip(dx) {
            if d != 0.0 {
                for (o, m) in out.iter_mut().zip(chunk) {
                    *o += m * d;
                }
            }
        }
    }

    /// `f_j(x_{N_j})` from the global vector.
    pub fn value(&self, partition: &BlockPartition, x: &[f64]) -> f64 {
        let mut z = vec![0.0; self.cache_dim];
        self.measure(partition, x, &mut z);
        self.value_at(&z)
    }

    /// Gradient of `f_j` with respect to its local vector `x_{N_j}`.
    pub fn local_gradient(&self, partition: &BlockPartition, x: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; self.cache_dim];
        self.measure(partition, x, &mut z);
        let mut g = vec![0.0; self.cache_dim];
        self.outer_gradient(&z, &mut g);
        let mut out = vec![0.0; self.local_dim()];
        for p in 0..self.blocks.len() {
            let (lo, hi) = (self.local_offsets[p], self.local_offsets[p + 1]);
            self.accumulate_block_gradient(p, &g, &mut out[lo..hi]);
        }
        out
    }

    /// Gather `x_{N_j}` from the global vector.
    pub fn gather(&self, partition: &BlockPartition, x: &[f64]) -> Vec<f64> {
        self.blocks
            .iter()
            .flat_map(|&b| x[partition.range(b)].iter().copied())
            .collect()
    }

    /// Coordinate-wise curvature data of the block at `slot`, used for the
    /// reference stepsizes: residual rows add `a a^T` to a Gram matrix, the
    /// other kinds contribute a scalar bound.
    pub(crate) fn block_curvature(&self, slot: usize) -> BlockCurvature {
        let rows = self.slot_rows(slot);
        let dim = self.local_offsets[slot + 1] - self.local_offsets[slot];
        match &self.kind {
            SmoothKind::QuadraticResidual { .. } => BlockCurvature::Rank1(rows.to_vec()),
            SmoothKind::Logistic { scale, .. } => BlockCurvature::Scalar(scale * norm_sq(rows) / 4.0),
            SmoothKind::QuadraticConjugateDual { sigma, center } => {
                let m = center.len();
                let a: Vec<f64> = rows
                    .chunks_exact(self.cache_dim)
                    .flat_map(|c| c[..m].to_vec())
                    .collect();
                BlockCurvature::Scalar(spectral_norm_sq(&a, dim, m) / sigma)
            }
        }
    }

    /// Hessian of `phi_j` (constant for quadratic kinds), `cache_dim^2`
    /// row-major. Logistic components return `None`.
    pub(crate) fn outer_hessian(&self) -> Option<Vec<f64>> {
        let d = self.cache_dim;
        let mut h = vec![0.0; d * d];
        match &self.kind {
            SmoothKind::QuadraticResidual { .. } => h[0] = 1.0,
            SmoothKind::Logistic { .. } => return None,
            SmoothKind::QuadraticConjugateDual { sigma, center } => {
                for k in 0..center.len() {
                    h[k * d + k] = 1.0 / sigma;
                }
            }
        }
        Some(h)
    }

    /// `M_j` rows for `slot` (row-major `n_slot x cache_dim`).
    pub(crate) fn map_rows(&self, slot: usize) -> &[f64] {
        self.slot_rows(slot)
    }
}

pub(crate) enum BlockCurvature {
    Rank1(Vec<f64>),
    Scalar(f64),
}
