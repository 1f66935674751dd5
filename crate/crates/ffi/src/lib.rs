//! C ABI for the `prcd` solver.
//!
//! - Problems and solvers are opaque handles created by `*_new` / generator
//!   functions and released with the matching `*_free`.
//! - Every fallible function returns an `int32_t` status: `PRCD_OK` (0) on
//!   success, a negative `PRCD_ERR_*` code otherwise. Results come back
//!   through out-pointers.
//! - `prcd_last_error()` returns the message of the most recent failure on
//!   the calling thread.
//!
//! ```c
//! #include "prcd.h"
//!
//! PrcdProblem *p = NULL;
//! if (prcd_problem_generate_lasso(90, 100, 0.05, 0.1, 1, &p) != PRCD_OK) {
//!     fprintf(stderr, "%s\n", prcd_last_error());
//!     return 1;
//! }
//! PrcdSolver *s = NULL;
//! prcd_solver_new(p, PRCD_MODE_PRCD, 10, 0, 1, &s);
//! int32_t converged = 0;
//! prcd_solver_run(s, 100000, 1e-8, &converged);
//! prcd_solver_free(s);
//! prcd_problem_free(p);
//! ```

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;
use std::sync::Arc;

use prcd::analysis::RateBundle;
use prcd::harness::{build_lasso, generate_lasso, CooMatrix, LassoSpec};
use prcd::{
    CompositeProblem, Error, Mode, RunStatus, SamplerConfig, Solver, SolverConfig, StopRule,
};

pub const PRCD_OK: i32 = 0;
pub const PRCD_ERR_NULL_POINTER: i32 = -1;
pub const PRCD_ERR_INPUT: i32 = -2;
pub const PRCD_ERR_STRUCTURE: i32 = -3;
pub const PRCD_ERR_PARSE: i32 = -4;
pub const PRCD_ERR_IO: i32 = -5;
pub const PRCD_ERR_INTERNAL: i32 = -6;
pub const PRCD_ERR_PANIC: i32 = -7;

pub const PRCD_MODE_PRCD: i32 = 0;
pub const PRCD_MODE_PCDM1: i32 = 1;
pub const PRCD_MODE_FULL: i32 = 2;

/// Opaque composite problem.
pub struct PrcdProblem {
    inner: Arc<CompositeProblem>,
}

/// Opaque solver state. Holds its own reference to the problem, so the
/// problem handle may be freed first.
pub struct PrcdSolver {
    inner: Solver<Arc<CompositeProblem>>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::Input(_) | Error::NonPositiveLipschitz { .. } => PRCD_ERR_INPUT,
        Error::Structure(_) => PRCD_ERR_STRUCTURE,
        Error::Parse { .. } => PRCD_ERR_PARSE,
        Error::Io { .. } => PRCD_ERR_IO,
        Error::Internal(_) => PRCD_ERR_INTERNAL,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PRCD_OK,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            PRCD_ERR_NULL_POINTER
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            code_of(&e)
        }
        Err(_) => {
            set_last_error("panic inside prcd".to_string());
            PRCD_ERR_PANIC
        }
    }
}

unsafe fn nonnull<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn nonnull_mut<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn slice_in<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn slice_out<'a, T>(p: *mut T, len: usize, what: &'static str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

fn check_len(got: usize, want: usize, what: &str) -> Result<(), Failure> {
    if got != want {
        return Err(Error::Input(format!("{what} has length {got}, expected {want}")).into());
    }
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn prcd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Lasso problem `1/2 |A x - b|^2 + lambda |x|_1` with scalar blocks from
/// 0-based coordinate triplets.
///
/// # Safety
/// `row_idx`, `col_idx` and `values` must point to `nnz` elements, `rhs` to
/// `rows` elements, and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn prcd_problem_from_coo(
    rows: usize,
    cols: usize,
    nnz: usize,
    row_idx: *const usize,
    col_idx: *const usize,
    values: *const f64,
    rhs: *const f64,
    lambda: f64,
    out: *mut *mut PrcdProblem,
) -> i32 {
    guard(|| {
        let out = nonnull_mut(out, "out")?;
        let r = slice_in(row_idx, nnz, "row_idx")?;
        let c = slice_in(col_idx, nnz, "col_idx")?;
        let v = slice_in(values, nnz, "values")?;
        let b = slice_in(rhs, rows, "rhs")?;
        let entries = (0..nnz).map(|k| (r[k], c[k], v[k])).collect();
        let a = CooMatrix::new(rows, cols, entries)?;
        let problem = build_lasso(&a, b, lambda, None, 1)?;
        *out = Box::into_raw(Box::new(PrcdProblem {
            inner: Arc::new(problem),
        }));
        Ok(())
    })
}

/// Random sparse lasso instance with scalar blocks.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn prcd_problem_generate_lasso(
    m: usize,
    n: usize,
    sparsity: f64,
    lambda: f64,
    seed: u64,
    out: *mut *mut PrcdProblem,
) -> i32 {
    guard(|| {
        let out = nonnull_mut(out, "out")?;
        let spec = LassoSpec {
            m,
            n,
            sparsity,
            lambda,
            ..LassoSpec::default()
        };
        let g = generate_lasso(&spec, seed)?;
        *out = Box::into_raw(Box::new(PrcdProblem {
            inner: Arc::new(g.problem),
        }));
        Ok(())
    })
}

/// # Safety
/// `problem` must come from a prcd constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn prcd_problem_free(problem: *mut PrcdProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Dimension, block count, component count and the separability measures.
/// Any out-pointer may be NULL.
///
/// # Safety
/// `problem` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn prcd_problem_dims(
    problem: *const PrcdProblem,
    dim: *mut usize,
    num_blocks: *mut usize,
    num_components: *mut usize,
    omega: *mut usize,
    omega_bar: *mut usize,
) -> i32 {
    guard(|| {
        let p = &nonnull(problem, "problem")?.inner;
        let st = p.structure();
        for (ptr, v) in [
            (dim, p.dim()),
            (num_blocks, p.num_blocks()),
            (num_components, p.num_components()),
            (omega, st.omega()),
            (omega_bar, st.omega_bar()),
        ] {
            if let Some(r) = ptr.as_mut() {
                *r = v;
            }
        }
        Ok(())
    })
}

/// `F(x)`; `+inf` outside the regularizer's domain.
///
/// # Safety
/// `x` must point to `len` doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn prcd_problem_objective(
    problem: *const PrcdProblem,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let p = &nonnull(problem, "problem")?.inner;
        let out = nonnull_mut(out, "out")?;
        let x = slice_in(x, len, "x")?;
        check_len(len, p.dim(), "x")?;
        *out = p.eval_objective(x)?;
        Ok(())
    })
}

/// Copy the per-block weights `w_i` into `out` (length = block count).
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn prcd_problem_weights(
    problem: *const PrcdProblem,
    out: *mut f64,
    len: usize,
) -> i32 {
    guard(|| {
        let p = &nonnull(problem, "problem")?.inner;
        check_len(len, p.num_blocks(), "out")?;
        slice_out(out, len, "out")?.copy_from_slice(p.weights().diag());
        Ok(())
    })
}

/// Create a solver starting from `x0 = 0` with tau-nice sampling.
///
/// # Safety
/// `problem` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn prcd_solver_new(
    problem: *const PrcdProblem,
    mode: i32,
    tau: usize,
    seed: u64,
    workers: usize,
    out: *mut *mut PrcdSolver,
) -> i32 {
    guard(|| {
        let p = nonnull(problem, "problem")?.inner.clone();
        let out = nonnull_mut(out, "out")?;
        let (mode, tau) = match mode {
            PRCD_MODE_PRCD => (Mode::Prcd, tau),
            PRCD_MODE_PCDM1 => (Mode::Pcdm1, tau),
            PRCD_MODE_FULL => (Mode::FullProxGrad, p.num_blocks()),
            other => return Err(Error::Input(format!("unknown mode {other}")).into()),
        };
        let cfg = SolverConfig {
            mode,
            sampler: SamplerConfig::tau_nice(tau, seed),
            workers,
            record_time: false,
            ..SolverConfig::default()
        };
        let x0 = vec![0.0; p.dim()];
        let solver = Solver::new(p, cfg, &x0)?;
        *out = Box::into_raw(Box::new(PrcdSolver { inner: solver }));
        Ok(())
    })
}

/// One iteration.
///
/// # Safety
/// `solver` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn prcd_solver_step(solver: *mut PrcdSolver) -> i32 {
    guard(|| {
        nonnull_mut(solver, "solver")?.inner.step()?;
        Ok(())
    })
}

/// Iterate until the W-norm of the proximal-gradient mapping is at most
/// `tol` or `max_iters` more iterations have run. `converged` (may be NULL)
/// receives 1 or 0.
///
/// # Safety
/// `solver` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn prcd_solver_run(
    solver: *mut PrcdSolver,
    max_iters: u64,
    tol: f64,
    converged: *mut i32,
) -> i32 {
    guard(|| {
        let s = &mut nonnull_mut(solver, "solver")?.inner;
        s.set_stop(StopRule::MappingNorm { tol }, max_iters)?;
        let out = s.run()?;
        if let Some(c) = converged.as_mut() {
            *c = (out.status == RunStatus::Converged) as i32;
        }
        Ok(())
    })
}

/// Copy the current iterate into `out` (length = problem dimension).
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn prcd_solver_x(solver: *const PrcdSolver, out: *mut f64, len: usize) -> i32 {
    guard(|| {
        let s = &nonnull(solver, "solver")?.inner;
        check_len(len, s.x().len(), "out")?;
        slice_out(out, len, "out")?.copy_from_slice(s.x());
        Ok(())
    })
}

/// Current objective value and iteration count. Either pointer may be NULL.
///
/// # Safety
/// `solver` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn prcd_solver_objective(
    solver: *const PrcdSolver,
    objective: *mut f64,
    iterations: *mut u64,
) -> i32 {
    guard(|| {
        let s = &nonnull(solver, "solver")?.inner;
        if let Some(o) = objective.as_mut() {
            *o = s.objective();
        }
        if let Some(k) = iterations.as_mut() {
            *k = s.iteration();
        }
        Ok(())
    })
}

/// # Safety
/// `solver` must come from `prcd_solver_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn prcd_solver_free(solver: *mut PrcdSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Expected-gap bound `N (R^2 / 2 + delta0) / (tau k + N)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn prcd_sublinear_bound(
    num_blocks: usize,
    tau: usize,
    r_w: f64,
    delta0: f64,
    k: f64,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let out = nonnull_mut(out, "out")?;
        let b = RateBundle::new(num_blocks, tau, r_w, delta0);
        b.validate()?;
        *out = b.sublinear_bound(k);
        Ok(())
    })
}

/// Contraction factor `1 - tau sigma_W / N`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn prcd_strongly_convex_factor(
    num_blocks: usize,
    tau: usize,
    sigma_w: f64,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let out = nonnull_mut(out, "out")?;
        let mut b = RateBundle::new(num_blocks, tau, 0.0, 0.0);
        b.sigma_w = Some(sigma_w);
        *out = b.strongly_convex_factor()?;
        Ok(())
    })
}

/// Linear rate `theta` under the generalized error bound.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn prcd_gebp_theta(
    num_blocks: usize,
    tau: usize,
    r_w: f64,
    kappa1: f64,
    kappa2: f64,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let out = nonnull_mut(out, "out")?;
        let mut b = RateBundle::new(num_blocks, tau, r_w, 0.0);
        b.kappa1 = Some(kappa1);
        b.kappa2 = Some(kappa2);
        *out = b.gebp_linear_theta()?;
        Ok(())
    })
}
