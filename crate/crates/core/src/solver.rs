//! Synchronous parallel randomized block-coordinate descent.
//!
//! Each iteration draws a block set `S`, computes
//! `x_i <- prox_i(x_i - grad_i f(x) / w_i)` for every `i in S` from the
//! iteration-start state, and then applies the resulting measurement deltas in
//! the order of `S`. Block updates are pure functions of the snapshot, so the
//! result does not depend on how many workers computed them.

use std::borrow::Borrow;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::CompositeProblem;
use crate::prox::proximal_step_from_gradient;
use crate::sampling::{Sampler, SamplerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Weights `w_i = sum_{j in N_bar_i} L_j`.
    #[default]
    Prcd,
    /// Reference weights `min(omega, tau) L_i`.
    Pcdm1,
    /// Every block every iteration, no sampling.
    FullProxGrad,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum StopRule {
    /// Stop once `|grad^+ F(x)|_W <= tol`, checked every `check_stride`
    /// iterations.
    MappingNorm { tol: f64 },
    /// Stop once `F(x) - f_star <= tol`.
    Gap { f_star: f64, tol: f64 },
    /// Run until `max_iters`.
    MaxIters,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub mode: Mode,
    pub sampler: SamplerConfig,
    pub max_iters: u64,
    pub stop: StopRule,
    pub workers: usize,
    /// Mapping-norm check period; `None` means `ceil(10 N / tau)`.
    pub check_stride: Option<u64>,
    /// Trace record period. The initial and final iterates are always logged.
    pub log_stride: u64,
    /// Period of the from-scratch cache check; 0 disables it.
    pub consistency_stride: u64,
    /// Record wall-clock time in the trace; off gives reproducible traces.
    pub record_time: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Prcd,
            sampler: SamplerConfig::tau_nice(1, 0),
            max_iters: 100_000,
            stop: StopRule::MappingNorm { tol: 1e-8 },
            workers: 1,
            check_stride: None,
            log_stride: 1,
            consistency_stride: 1000,
            record_time: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub k: u64,
    pub objective: f64,
    /// Only present on iterations where the full mapping was evaluated.
    pub mapping_norm: Option<f64>,
    /// `|S^k|` of the step that produced this iterate (0 for `k = 0`).
    pub blocks: usize,
    pub coordinate_updates: u64,
    /// Seconds since the start of `run`; 0 when timing is off.
    pub elapsed: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub iterations: u64,
    pub objective: f64,
    pub mapping_norm: f64,
    pub coordinate_updates: u64,
    pub x: Vec<f64>,
    pub trace: Trace,
}

struct BlockUpdate {
    block: usize,
    x_new: Vec<f64>,
    psi_new: f64,
    /// Measurement deltas for each component of `N_bar_i`, concatenated;
    /// empty when the block did not move.
    deltas: Vec<f64>,
}

pub struct Solver<P: Borrow<CompositeProblem>> {
    problem: P,
    config: SolverConfig,
    step_weights: Vec<f64>,
    sampler: Option<Sampler>,
    pool: Option<rayon::ThreadPool>,
    x: Vec<f64>,
    cache: Vec<f64>,
    component_values: Vec<f64>,
    psi_values: Vec<f64>,
    objective: f64,
    k: u64,
    coordinate_updates: u64,
    stamp: Vec<u64>,
    touched: Vec<usize>,
    draw: Vec<usize>,
}

impl<P: Borrow<CompositeProblem> + Sync> Solver<P> {
    /// `x0` is projected onto `dom Psi` blockwise.
    pub fn new(problem: P, config: SolverConfig, x0: &[f64]) -> Result<Self> {
        let prob = problem.borrow();
        let nb = prob.num_blocks();
        if config.workers == 0 {
            return Err(Error::input("workers must be at least 1"));
        }
        if config.log_stride == 0 {
            return Err(Error::input("log stride must be at least 1"));
        }
        if config.check_stride == Some(0) {
            return Err(Error::input("check stride must be at least 1"));
        }
        match config.stop {
            StopRule::MappingNorm { tol } | StopRule::Gap { tol, .. } if !(tol >= 0.0) => {
                return Err(Error::input(format!("stop tolerance must be >= 0, got {tol}")));
            }
            StopRule::Gap { f_star, .. } if !f_star.is_finite() => {
                return Err(Error::input("reference optimal value must be finite"));
            }
            _ => {}
        }
        if x0.len() != prob.dim() {
            return Err(Error::input(format!(
                "initial point has length {}, expected {}",
                x0.len(),
                prob.dim()
            )));
        }
        if let Some(c) = x0.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!("initial coordinate {c} is not finite")));
        }
        let (sampler, step_weights) = match config.mode {
            Mode::Prcd => (
                Some(Sampler::new(config.sampler, nb)?),
                prob.weights().diag().to_vec(),
            ),
            Mode::Pcdm1 => {
                let w = prob.pcdm1_weights(config.sampler.tau);
                if let Some(i) = w.iter().position(|&v| !(v > 0.0)) {
                    return Err(Error::structure(format!("block {i} has zero curvature")));
                }
                (Some(Sampler::new(config.sampler, nb)?), w)
            }
            Mode::FullProxGrad => (None, prob.weights().diag().to_vec()),
        };
        let pool = if config.workers > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(config.workers)
                    .build()
                    .map_err(|e| Error::Internal(format!("thread pool: {e}")))?,
            )
        } else {
            None
        };
        let x = prob.project(x0);
        let mut s = Self {
            step_weights,
            sampler,
            pool,
            x,
            cache: Vec::new(),
            component_values: Vec::new(),
            psi_values: Vec::new(),
            objective: 0.0,
            k: 0,
            coordinate_updates: 0,
            stamp: vec![u64::MAX; prob.num_components()],
            touched: Vec::new(),
            draw: Vec::new(),
            problem,
            config,
        };
        s.refresh();
        Ok(s)
    }

    pub fn problem(&self) -> &CompositeProblem {
        self.problem.borrow()
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Replace the stop rule and iteration budget for later `run` calls.
    pub fn set_stop(&mut self, stop: StopRule, max_iters: u64) -> Result<()> {
        match stop {
            StopRule::MappingNorm { tol } | StopRule::Gap { tol, .. } if !(tol >= 0.0) => {
                return Err(Error::input(format!("stop tolerance must be >= 0, got {tol}")));
            }
            StopRule::Gap { f_star, .. } if !f_star.is_finite() => {
                return Err(Error::input("reference optimal value must be finite"));
            }
            _ => {}
        }
        self.config.stop = stop;
        self.config.max_iters = max_iters;
        Ok(())
    }

    /// Incrementally maintained `F(x)`.
    pub fn objective(&self) -> f64 {
        self.objective
    }

    pub fn iteration(&self) -> u64 {
        self.k
    }

    /// `sum_k |S^k|`.
    pub fn coordinate_updates(&self) -> u64 {
        self.coordinate_updates
    }

    /// Weights used by the step (differs from `W` in the reference mode).
    pub fn step_weights(&self) -> &[f64] {
        &self.step_weights
    }

    pub fn check_stride(&self) -> u64 {
        self.config.check_stride.unwrap_or_else(|| {
            let nb = self.problem().num_blocks() as u64;
            let tau = match self.config.mode {
                Mode::FullProxGrad => nb,
                _ => self.config.sampler.tau as u64,
            };
            (10 * nb).div_ceil(tau).max(1)
        })
    }

    /// Recompute caches and `F` from scratch.
    fn refresh(&mut self) {
        let prob = self.problem.borrow();
        let part = prob.partition();
        self.cache = prob.measurements(&self.x);
        let off = prob.cache_offsets();
        self.component_values = prob
            .components()
            .iter()
            .enumerate()
            .map(|(j, c)| c.value_at(&self.cache[off[j]..off[j + 1]]))
            .collect();
        self.psi_values = (0..prob.num_blocks())
            .map(|i| prob.regularizers()[i].value(&self.x[part.range(i)]))
            .collect();
        self.objective =
            self.component_values.iter().sum::<f64>() + self.psi_values.iter().sum::<f64>();
    }

    /// Compare the cached measurements with a from-scratch evaluation.
    pub fn check_consistency(&self) -> Result<()> {
        let prob = self.problem();
        let fresh = prob.measurements(&self.x);
        let off = prob.cache_offsets();
        for j in 0..prob.num_components() {
            let (c, f) = (&self.cache[off[j]..off[j + 1]], &fresh[off[j]..off[j + 1]]);
            let scale = 1.0 + f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if let Some(k) = (0..c.len()).find(|&k| !((c[k] - f[k]).abs() <= 1e-8 * scale)) {
                return Err(Error::Internal(format!(
                    "measurement cache drifted at iteration {}: component {j}, entry {k}: \
                     cached {:e}, recomputed {:e}",
                    self.k, c[k], f[k]
                )));
            }
        }
        Ok(())
    }

    /// `|grad^+ F(x)|_W` for the current iterate, from the caches.
    pub fn mapping_norm(&self) -> f64 {
        let prob = self.problem();
        let g = prob.gradient_from_cache(&self.cache);
        let t = proximal_step_from_gradient(prob, &self.x, &g, prob.weights().diag());
        let d: Vec<f64> = self.x.iter().zip(&t).map(|(a, b)| a - b).collect();
        prob.weights().norm(prob.partition(), &d)
    }

    fn update_block(&self, i: usize) -> BlockUpdate {
        let prob = self.problem.borrow();
        let part = prob.partition();
        let st = prob.structure();
        let off = prob.cache_offsets();
        let range = part.range(i);
        let xi = &self.x[range.clone()];
        let mut grad = vec![0.0; xi.len()];
        let mut outer = Vec::new();
        for (&j, &slot) in st.components_of(i).iter().zip(st.slots_of(i)) {
            let c = &prob.components()[j];
            outer.resize(c.cache_dim(), 0.0);
            c.outer_gradient(&self.cache[off[j]..off[j + 1]], &mut outer);
            c.accumulate_block_gradient(slot, &outer, &mut grad);
        }
        let w = self.step_weights[i];
        let reg = &prob.regularizers()[i];
        let x_new: Vec<f64> = xi
            .iter()
            .zip(&grad)
            .map(|(&v, &g)| reg.prox_scalar(v - g / w, w))
            .collect();
        let dx: Vec<f64> = x_new.iter().zip(xi).map(|(a, b)| a - b).collect();
        let mut deltas = Vec::new();
        if dx.iter().any(|&d| d != 0.0) {
            for (&j, &slot) in st.components_of(i).iter().zip(st.slots_of(i)) {
                let c = &prob.components()[j];
                let start = deltas.len();
                deltas.resize(start + c.cache_dim(), 0.0);
                c.measure_delta(slot, &dx, &mut deltas[start..]);
            }
        }
        BlockUpdate {
            block: i,
            psi_new: reg.value(&x_new),
            x_new,
            deltas,
        }
    }

    /// One iteration on an explicit block set. Blocks must be distinct; they
    /// are applied in the given order.
    pub fn step_with(&mut self, blocks: &[usize]) -> Result<()> {
        let nb = self.problem().num_blocks();
        for (p, &i) in blocks.iter().enumerate() {
            if i >= nb {
                return Err(Error::input(format!("block {i} out of range (N = {nb})")));
            }
            if blocks[..p].contains(&i) {
                return Err(Error::input(format!("block {i} repeated in sample")));
            }
        }
        self.apply(blocks)
    }

    fn apply(&mut self, blocks: &[usize]) -> Result<()> {
        let updates: Vec<BlockUpdate> = match &self.pool {
            Some(pool) if blocks.len() > 1 => {
                let chunk = blocks.len().div_ceil(self.config.workers).max(1);
                pool.install(|| {
                    blocks
                        .par_iter()
                        .with_min_len(chunk)
                        .map(|&i| self.update_block(i))
                        .collect()
                })
            }
            _ => blocks.iter().map(|&i| self.update_block(i)).collect(),
        };

        let prob = self.problem.borrow();
        let part = prob.partition();
        let st = prob.structure();
        let off = prob.cache_offsets();
        let tag = self.k;
        self.touched.clear();
        for u in updates {
            let i = u.block;
            self.objective += u.psi_new - self.psi_values[i];
            self.psi_values[i] = u.psi_new;
            if u.deltas.is_empty() {
                continue;
            }
            self.x[part.range(i)].copy_from_slice(&u.x_new);
            let mut pos = 0;
            for &j in st.components_of(i) {
                let d = off[j + 1] - off[j];
                for (z, dz) in self.cache[off[j]..off[j + 1]]
                    .iter_mut()
                    .zip(&u.deltas[pos..pos + d])
                {
                    *z += dz;
                }
                pos += d;
                if self.stamp[j] != tag {
                    self.stamp[j] = tag;
                    self.touched.push(j);
                }
            }
        }
        for &j in &self.touched {
            let v = prob.components()[j].value_at(&self.cache[off[j]..off[j + 1]]);
            self.objective += v - self.component_values[j];
            self.component_values[j] = v;
        }
        self.k += 1;
        self.coordinate_updates += blocks.len() as u64;

        let r = self.config.consistency_stride;
        if r > 0 && self.k.is_multiple_of(r) {
            self.check_consistency()?;
            self.refresh();
        }
        Ok(())
    }

    /// Draw a block set and take one step. Returns `|S|`.
    pub fn step(&mut self) -> Result<usize> {
        let mut draw = std::mem::take(&mut self.draw);
        match &mut self.sampler {
            Some(s) => s.draw_into(&mut draw),
            None => {
                draw.clear();
                draw.extend(0..self.problem().num_blocks());
            }
        }
        let res = self.apply(&draw);
        let n = draw.len();
        self.draw = draw;
        res.map(|_| n)
    }

    /// Iterate until the stop rule holds or `max_iters` is reached.
    pub fn run(&mut self) -> Result<RunOutcome> {
        let start = Instant::now();
        let elapsed = |on: bool| {
            if on {
                start.elapsed().as_secs_f64()
            } else {
                0.0
            }
        };
        let check_stride = self.check_stride();
        let log_stride = self.config.log_stride;
        let stop = self.config.stop;
        let mut trace = Trace::default();

        let converged = |s: &Self, norm: Option<f64>| match stop {
            StopRule::MappingNorm { tol } => norm.is_some_and(|n| n <= tol),
            StopRule::Gap { f_star, tol } => s.objective - f_star <= tol,
            StopRule::MaxIters => false,
        };
        let wants_norm = |k: u64| {
            matches!(stop, StopRule::MappingNorm { .. }) && (k == 0 || k.is_multiple_of(check_stride))
        };

        let start_k = self.k;
        let mut norm = wants_norm(0).then(|| self.mapping_norm());
        trace.records.push(TraceRecord {
            k: self.k,
            objective: self.objective,
            mapping_norm: norm,
            blocks: 0,
            coordinate_updates: self.coordinate_updates,
            elapsed: elapsed(self.config.record_time),
        });
        let mut done = converged(self, norm);
        while !done && self.k - start_k < self.config.max_iters {
            let blocks = self.step()?;
            let local = self.k - start_k;
            norm = wants_norm(local).then(|| self.mapping_norm());
            done = converged(self, norm);
            let last = done || local == self.config.max_iters;
            if last || local.is_multiple_of(log_stride) {
                trace.records.push(TraceRecord {
                    k: self.k,
                    objective: self.objective,
                    mapping_norm: norm,
                    blocks,
                    coordinate_updates: self.coordinate_updates,
                    elapsed: elapsed(self.config.record_time),
                });
            }
        }
        let final_norm = match norm {
            Some(n) => n,
            None => self.mapping_norm(),
        };
        Ok(RunOutcome {
            status: if done {
                RunStatus::Converged
            } else {
                RunStatus::MaxIterations
            },
            iterations: self.k - start_k,
            objective: self.objective,
            mapping_norm: final_norm,
            coordinate_updates: self.coordinate_updates,
            x: self.x.clone(),
            trace,
        })
    }
}

/// Build a solver and run it to completion.
pub fn run(problem: &CompositeProblem, config: SolverConfig, x0: &[f64]) -> Result<RunOutcome> {
    Solver::new(problem, config, x0)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::BlockPartition;
    use crate::prox::Regularizer;
    use crate::smooth::SmoothComponent;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag_quadratic(w: &[f64]) -> CompositeProblem {
        let p = BlockPartition::scalar(w.len()).unwrap();
        let comps = w
            .iter()
            .enumerate()
            .map(|(i, &wi)| SmoothComponent::quadratic_residual(&p, &[(i, wi.sqrt())], 0.0).unwrap())
            .collect();
        CompositeProblem::new(p, comps, vec![Regularizer::Zero; w.len()]).unwrap()
    }

    fn random_lasso(seed: u64, n: usize, m: usize) -> CompositeProblem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = BlockPartition::scalar(n).unwrap();
        let mut comps = Vec::new();
        for _ in 0..m {
            let mut row = Vec::new();
            for c in 0..n {
                if rng.random::<f64>() < 0.3 {
                    row.push((c, rng.random_range(-1.0..1.0)));
                }
            }
            if !row.is_empty() {
                comps.push(SmoothComponent::quadratic_residual(&p, &row, rng.random_range(-1.0..1.0)).unwrap());
            }
        }
        for c in 0..n {
            comps.push(SmoothComponent::quadratic_residual(&p, &[(c, 0.3)], 0.0).unwrap());
        }
        CompositeProblem::new(p, comps, vec![Regularizer::L1 { lambda: 0.1 }; n]).unwrap()
    }

    fn config(mode: Mode, tau: usize, seed: u64) -> SolverConfig {
        SolverConfig {
            mode,
            sampler: SamplerConfig::tau_nice(tau, seed),
            max_iters: 200,
            stop: StopRule::MaxIters,
            record_time: false,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn empty_step_keeps_state() {
        let prob = random_lasso(1, 6, 5);
        let mut s = Solver::new(&prob, config(Mode::Prcd, 2, 0), &[0.5; 6]).unwrap();
        let (x, f) = (s.x().to_vec(), s.objective());
        s.step_with(&[]).unwrap();
        assert_eq!(s.x(), &x[..]);
        assert_eq!(s.objective(), f);
    }

    #[test]
    fn full_step_on_matched_quadratic_is_exact() {
        let prob = diag_quadratic(&[1.0, 4.0, 9.0]);
        let mut s = Solver::new(&prob, config(Mode::Prcd, 3, 0), &[1.0, -2.0, 3.0]).unwrap();
        s.step().unwrap();
        assert_eq!(s.x(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn one_dim_lasso_single_step() {
        let p = BlockPartition::scalar(1).unwrap();
        let c = SmoothComponent::quadratic_residual(&p, &[(0, 1.0)], 0.0).unwrap();
        let prob = CompositeProblem::new(p, vec![c], vec![Regularizer::L1 { lambda: 1.0 }]).unwrap();
        let mut s = Solver::new(&prob, config(Mode::Prcd, 1, 0), &[3.0]).unwrap();
        s.step().unwrap();
        assert_eq!(s.x(), &[0.0]);
    }

    #[test]
    fn infeasible_start_is_projected() {
        let p = BlockPartition::scalar(2).unwrap();
        let comps = (0..2)
            .map(|i| SmoothComponent::quadratic_residual(&p, &[(i, 1.0)], 1.0).unwrap())
            .collect();
        let prob = CompositeProblem::new(p, comps, vec![Regularizer::NonnegOrthant; 2]).unwrap();
        let s = Solver::new(&prob, config(Mode::Prcd, 1, 0), &[-1.0, 2.0]).unwrap();
        assert_eq!(s.x(), &[0.0, 2.0]);
        assert!(s.objective().is_finite());
    }

    #[test]
    fn descent_and_accounting() {
        let prob = random_lasso(3, 12, 10);
        let mut s = Solver::new(&prob, config(Mode::Prcd, 4, 9), &[1.0; 12]).unwrap();
        let out = s.run().unwrap();
        assert_eq!(out.status, RunStatus::MaxIterations);
        assert_eq!(out.coordinate_updates, 4 * 200);
        let recs = &out.trace.records;
        assert_eq!(recs.len(), 201);
        for w in recs.windows(2) {
            assert!(w[1].k > w[0].k);
            assert!(w[1].objective <= w[0].objective + 1e-10 * (1.0 + w[0].objective.abs()));
        }
        let exact = prob.eval_objective(s.x()).unwrap();
        assert!((exact - s.objective()).abs() <= 1e-10 * (1.0 + exact.abs()));
    }

    #[test]
    fn order_of_blocks_does_not_matter() {
        let prob = random_lasso(4, 10, 12);
        let x0: Vec<f64> = (0..10).map(|i| i as f64 * 0.3 - 1.0).collect();
        let mut a = Solver::new(&prob, config(Mode::Prcd, 5, 0), &x0).unwrap();
        let mut b = Solver::new(&prob, config(Mode::Prcd, 5, 0), &x0).unwrap();
        a.step_with(&[1, 3, 4, 7, 9]).unwrap();
        b.step_with(&[9, 4, 1, 7, 3]).unwrap();
        assert_eq!(a.x(), b.x());
        assert!((a.objective() - b.objective()).abs() <= 1e-12 * (1.0 + a.objective().abs()));
    }

    #[test]
    fn tau_n_equals_full_prox_grad() {
        let prob = random_lasso(5, 8, 9);
        let a = run(&prob, config(Mode::Prcd, 8, 123), &[0.7; 8]).unwrap();
        let b = run(&prob, config(Mode::FullProxGrad, 8, 0), &[0.7; 8]).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn worker_count_does_not_change_iterates() {
        let prob = random_lasso(6, 30, 25);
        let mut c1 = config(Mode::Prcd, 10, 4);
        c1.workers = 1;
        let mut c4 = c1.clone();
        c4.workers = 4;
        let a = run(&prob, c1, &[0.2; 30]).unwrap();
        let b = run(&prob, c4, &[0.2; 30]).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn same_seed_same_trace() {
        let prob = random_lasso(7, 15, 10);
        let a = run(&prob, config(Mode::Prcd, 3, 1), &[0.0; 15]).unwrap();
        let b = run(&prob, config(Mode::Prcd, 3, 1), &[0.0; 15]).unwrap();
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn full_prox_grad_converges_on_strongly_convex() {
        let prob = random_lasso(8, 10, 8);
        let mut cfg = config(Mode::FullProxGrad, 10, 0);
        cfg.stop = StopRule::MappingNorm { tol: 1e-10 };
        cfg.max_iters = 100_000;
        let out = run(&prob, cfg, &[1.0; 10]).unwrap();
        assert_eq!(out.status, RunStatus::Converged);
        assert!(out.mapping_norm <= 1e-10);
    }

    #[test]
    fn gap_rule_stops() {
        let prob = diag_quadratic(&[1.0, 2.0]);
        let mut cfg = config(Mode::Prcd, 1, 3);
        cfg.stop = StopRule::Gap {
            f_star: 0.0,
            tol: 1e-12,
        };
        cfg.max_iters = 1000;
        let out = run(&prob, cfg, &[1.0, 1.0]).unwrap();
        assert_eq!(out.status, RunStatus::Converged);
        assert!(out.objective <= 1e-12);
    }

    #[test]
    fn bad_sample_rejected() {
        let prob = diag_quadratic(&[1.0, 2.0]);
        let mut s = Solver::new(&prob, config(Mode::Prcd, 1, 0), &[1.0, 1.0]).unwrap();
        assert!(s.step_with(&[0, 0]).is_err());
        assert!(s.step_with(&[2]).is_err());
    }

    #[test]
    fn pcdm1_matches_prcd_when_rows_are_diagonal() {
        let prob = diag_quadratic(&[1.0, 2.0, 3.0, 4.0]);
        let a = run(&prob, config(Mode::Prcd, 2, 8), &[1.0; 4]).unwrap();
        let b = run(&prob, config(Mode::Pcdm1, 2, 8), &[1.0; 4]).unwrap();
        assert_eq!(a.x, b.x);
    }
}
