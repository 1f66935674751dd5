//! Experiment runner: reference optimum, solver cells over
//! (mode, tau, seed), per-cell traces and a summary table.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::problem::CompositeProblem;
use crate::sampling::SamplerConfig;
use crate::solver::{run, Mode, RunOutcome, RunStatus, SolverConfig, StopRule, Trace};

/// Deterministic full proximal-gradient solve to `|grad^+ F|_W <= tol`.
pub fn reference_optimum(
    problem: &CompositeProblem,
    x0: &[f64],
    tol: f64,
    max_iters: u64,
    workers: usize,
) -> Result<RunOutcome> {
    let nb = problem.num_blocks();
    let cfg = SolverConfig {
        mode: Mode::FullProxGrad,
        sampler: SamplerConfig::tau_nice(nb, 0),
        max_iters,
        stop: StopRule::MappingNorm { tol },
        workers,
        check_stride: Some(1),
        log_stride: max_iters.max(1),
        record_time: false,
        ..SolverConfig::default()
    };
    run(problem, cfg, x0)
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub mode: Mode,
    pub tau: usize,
    pub seed: u64,
    pub status: RunStatus,
    pub iterations: u64,
    pub coordinate_updates: u64,
    /// `sum_k |S^k| / N`.
    pub normalized_updates: f64,
    pub final_objective: f64,
    pub trace: Trace,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub n: usize,
    pub m: usize,
    pub sparsity: f64,
    pub omega_bar: usize,
    pub omega: usize,
    pub tau: usize,
    pub seed: u64,
    pub prcd_updates: Option<f64>,
    pub pcdm1_updates: Option<f64>,
    pub full_updates: Option<f64>,
    pub f_star: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub n: usize,
    pub m: usize,
    pub sparsity: f64,
    pub omega: usize,
    pub omega_bar: usize,
    pub f_star: f64,
    pub reference_converged: bool,
    pub initial_objective: f64,
    pub cells: Vec<CellResult>,
}

impl ExperimentReport {
    pub fn delta0(&self) -> f64 {
        self.initial_objective - self.f_star
    }

    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut keys: Vec<(usize, u64)> = self.cells.iter().map(|c| (c.tau, c.seed)).collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .map(|(tau, seed)| {
                let find = |mode| {
                    self.cells
                        .iter()
                        .find(|c| c.mode == mode && c.tau == tau && c.seed == seed)
                        .filter(|c| c.status == RunStatus::Converged)
                        .map(|c| c.normalized_updates)
                };
                SummaryRow {
                    n: self.n,
                    m: self.m,
                    sparsity: self.sparsity,
                    omega_bar: self.omega_bar,
                    omega: self.omega,
                    tau,
                    seed,
                    prcd_updates: find(Mode::Prcd),
                    pcdm1_updates: find(Mode::Pcdm1),
                    full_updates: find(Mode::FullProxGrad),
                    f_star: self.f_star,
                }
            })
            .collect()
    }
}

/// Run every configured cell from `x0 = 0` (projected onto `dom Psi`).
pub fn run_experiment(
    problem: &CompositeProblem,
    m: usize,
    config: &ExperimentConfig,
) -> Result<ExperimentReport> {
    config.validate()?;
    let s = &config.solver;
    let nb = problem.num_blocks();
    let x0 = problem.project(&vec![0.0; problem.dim()]);
    let initial_objective = problem.eval_objective(&x0)?;
    let reference = reference_optimum(problem, &x0, s.reference_tol, s.reference_max_iters, s.workers)?;
    let f_star = reference.objective;
    let target = s.relative_gap * (initial_objective - f_star).max(0.0);

    let mut cells = Vec::new();
    for &mode in &s.modes {
        let taus: Vec<usize> = if mode == Mode::FullProxGrad { vec![nb] } else { s.taus.clone() };
        for tau in taus {
            if tau == 0 || tau > nb {
                return Err(Error::input(format!("tau {tau} outside [1, {nb}]")));
            }
            let seeds: &[u64] = if mode == Mode::FullProxGrad { &s.seeds[..1] } else { &s.seeds };
            for &seed in seeds {
                cells.push((mode, tau, seed));
            }
        }
    }
    let results: Vec<Result<CellResult>> = cells
        .par_iter()
        .map(|&(mode, tau, seed)| {
            let cfg = SolverConfig {
                mode,
                sampler: SamplerConfig {
                    scheme: s.scheme,
                    tau,
                    seed,
                },
                max_iters: s.max_iters,
                stop: StopRule::Gap { f_star, tol: target },
                workers: s.workers,
                log_stride: s.log_stride,
                record_time: s.record_time,
                ..SolverConfig::default()
            };
            let out = run(problem, cfg, &x0)?;
            Ok(CellResult {
                mode,
                tau,
                seed,
                status: out.status,
                iterations: out.iterations,
                coordinate_updates: out.coordinate_updates,
                normalized_updates: out.coordinate_updates as f64 / nb as f64,
                final_objective: out.objective,
                trace: out.trace,
            })
        })
        .collect();
    let cells = results.into_iter().collect::<Result<Vec<_>>>()?;
    let st = problem.structure();
    Ok(ExperimentReport {
        n: problem.dim(),
        m,
        sparsity: config.problem.sparsity,
        omega: st.omega(),
        omega_bar: st.omega_bar(),
        f_star,
        reference_converged: reference.status == RunStatus::Converged,
        initial_objective,
        cells,
    })
}

#[derive(Serialize)]
struct TraceRow {
    k: u64,
    normalized_updates: f64,
    gap: f64,
    mapping_norm: Option<f64>,
    elapsed: f64,
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => Error::Internal(format!("writing {}: {other:?}", path.display())),
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Prcd => "prcd",
        Mode::Pcdm1 => "pcdm1",
        Mode::FullProxGrad => "full",
    }
}

/// Write `summary.csv` and, when `traces` is set, one
/// `trace_<mode>_tau<tau>_seed<seed>.csv` per cell.
pub fn write_report(report: &ExperimentReport, dir: &Path, traces: bool, num_blocks: usize) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join("summary.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| csv_err(&path, e))?;
    for row in report.summary() {
        w.serialize(row).map_err(|e| csv_err(&path, e))?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    if traces {
        for c in &report.cells {
            let path = dir.join(format!("trace_{}_tau{}_seed{}.csv", mode_name(c.mode), c.tau, c.seed));
            write_trace(&path, &c.trace, report.f_star, num_blocks)?;
        }
    }
    Ok(())
}

/// Trace CSV with columns `k, normalized_updates, gap, mapping_norm, elapsed`.
pub fn write_trace(path: &Path, trace: &Trace, f_star: f64, num_blocks: usize) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    for r in &trace.records {
        w.serialize(TraceRow {
            k: r.k,
            normalized_updates: r.coordinate_updates as f64 / num_blocks as f64,
            gap: r.objective - f_star,
            mapping_norm: r.mapping_norm,
            elapsed: r.elapsed,
        })
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
