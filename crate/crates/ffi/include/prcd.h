#ifndef PRCD_H
#define PRCD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define PRCD_OK 0

#define PRCD_ERR_NULL_POINTER -1

#define PRCD_ERR_INPUT -2

#define PRCD_ERR_STRUCTURE -3

#define PRCD_ERR_PARSE -4

#define PRCD_ERR_IO -5

#define PRCD_ERR_INTERNAL -6

#define PRCD_ERR_PANIC -7

#define PRCD_MODE_PRCD 0

#define PRCD_MODE_PCDM1 1

#define PRCD_MODE_FULL 2

/*
 Opaque composite problem.
 */
typedef struct PrcdProblem PrcdProblem;

/*
 Opaque solver state. Holds its own reference to the problem, so the
 problem handle may be freed first.
 */
typedef struct PrcdSolver PrcdSolver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or NULL. The pointer is
 valid until the next failing call on the same thread.
 */
const char *prcd_last_error(void);

/*
 Lasso problem `1/2 |A x - b|^2 + lambda |x|_1` with scalar blocks from
 0-based coordinate triplets.

 # Safety
 `row_idx`, `col_idx` and `values` must point to `nnz` elements, `rhs` to
 `rows` elements, and `out` must be a valid pointer.
 */
int32_t prcd_problem_from_coo(size_t rows,
                              size_t cols,
                              size_t nnz,
                              const size_t *row_idx,
                              const size_t *col_idx,
                              const double *values,
                              const double *rhs,
                              double lambda,
                              struct PrcdProblem **out);

/*
 Random sparse lasso instance with scalar blocks.

 # Safety
 `out` must be a valid pointer.
 */
int32_t prcd_problem_generate_lasso(size_t m,
                                    size_t n,
                                    double sparsity,
                                    double lambda,
                                    uint64_t seed,
                                    struct PrcdProblem **out);

/*
 # Safety
 `problem` must come from a prcd constructor and not be freed twice.
 */
void prcd_problem_free(struct PrcdProblem *problem);

/*
 Dimension, block count, component count and the separability measures.
 Any out-pointer may be NULL.

 # Safety
 `problem` must be a valid handle.
 */
int32_t prcd_problem_dims(const struct PrcdProblem *problem,
                          size_t *dim,
                          size_t *num_blocks,
                          size_t *num_components,
                          size_t *omega,
                          size_t *omega_bar);

/*
 `F(x)`; `+inf` outside the regularizer's domain.

 # Safety
 `x` must point to `len` doubles and `out` must be valid.
 */
int32_t prcd_problem_objective(const struct PrcdProblem *problem,
                               const double *x,
                               size_t len,
                               double *out);

/*
 Copy the per-block weights `w_i` into `out` (length = block count).

 # Safety
 `out` must point to `len` writable doubles.
 */
int32_t prcd_problem_weights(const struct PrcdProblem *problem, double *out, size_t len);

/*
 Create a solver starting from `x0 = 0` with tau-nice sampling.

 # Safety
 `problem` must be a valid handle and `out` a valid pointer.
 */
int32_t prcd_solver_new(const struct PrcdProblem *problem,
                        int32_t mode,
                        size_t tau,
                        uint64_t seed,
                        size_t workers,
                        struct PrcdSolver **out);

/*
 One iteration.

 # Safety
 `solver` must be a valid handle.
 */
int32_t prcd_solver_step(struct PrcdSolver *solver);

/*
 Iterate until the W-norm of the proximal-gradient mapping is at most
 `tol` or `max_iters` more iterations have run. `converged` (may be NULL)
 receives 1 or 0.

 # Safety
 `solver` must be a valid handle.
 */
int32_t prcd_solver_run(struct PrcdSolver *solver,
                        uint64_t max_iters,
                        double tol,
                        int32_t *converged);

/*
 Copy the current iterate into `out` (length = problem dimension).

 # Safety
 `out` must point to `len` writable doubles.
 */
int32_t prcd_solver_x(const struct PrcdSolver *solver, double *out, size_t len);

/*
 Current objective value and iteration count. Either pointer may be NULL.

 # Safety
 `solver` must be a valid handle.
 */
int32_t prcd_solver_objective(const struct PrcdSolver *solver,
                              double *objective,
                              uint64_t *iterations);

/*
 # Safety
 `solver` must come from `prcd_solver_new` and not be freed twice.
 */
void prcd_solver_free(struct PrcdSolver *solver);

/*
 Expected-gap bound `N (R^2 / 2 + delta0) / (tau k + N)`.

 # Safety
 `out` must be a valid pointer.
 */
int32_t prcd_sublinear_bound(size_t num_blocks,
                             size_t tau,
                             double r_w,
                             double delta0,
                             double k,
                             double *out);

/*
 Contraction factor `1 - tau sigma_W / N`.

 # Safety
 `out` must be a valid pointer.
 */
int32_t prcd_strongly_convex_factor(size_t num_blocks, size_t tau, double sigma_w, double *out);

/*
 Linear rate `theta` under the generalized error bound.

 # Safety
 `out` must be a valid pointer.
 */
int32_t prcd_gebp_theta(size_t num_blocks,
                        size_t tau,
                        double r_w,
                        double kappa1,
                        double kappa2,
                        double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PRCD_H */
