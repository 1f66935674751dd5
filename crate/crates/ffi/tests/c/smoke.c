#include <math.h>
#include <stdio.h>
#include "prcd.h"

int main(void) {
    PrcdProblem *p = NULL;
    PrcdSolver *s = NULL;
    int32_t converged = 0;
    double f = 0.0;
    uint64_t k = 0;
    size_t dim = 0;

    if (prcd_problem_generate_lasso(40, 30, 0.2, 0.1, 3, &p) != PRCD_OK) {
        fprintf(stderr, "generate: %s\n", prcd_last_error());
        return 1;
    }
    if (prcd_problem_dims(p, &dim, NULL, NULL, NULL, NULL) != PRCD_OK || dim != 30) {
        return 2;
    }
    if (prcd_solver_new(p, PRCD_MODE_PRCD, 4, 11, 2, &s) != PRCD_OK) {
        fprintf(stderr, "solver: %s\n", prcd_last_error());
        return 3;
    }
    prcd_problem_free(p);
    if (prcd_solver_run(s, 200000, 1e-8, &converged) != PRCD_OK || !converged) {
        return 4;
    }
    prcd_solver_objective(s, &f, &k);
    if (!isfinite(f) || k == 0) {
        return 5;
    }
    if (prcd_solver_new(NULL, PRCD_MODE_PRCD, 4, 11, 1, &s) != PRCD_ERR_NULL_POINTER) {
        return 6;
    }
    prcd_solver_free(s);
    printf("ok %.12g %llu\n", f, (unsigned long long)k);
    return 0;
}
