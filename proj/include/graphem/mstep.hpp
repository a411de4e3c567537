#pragma once

// M-step solvers for the regularized surrogate
//
//   F(A) = f1(A) + sum_m f_m(A),   f1(A) = -q(A; A_ref).

#include "graphem/estep.hpp"
#include "graphem/regularizer.hpp"

namespace graphem {

struct MsConfig {
    /// Non-positive values select the defaults lambda = 0.9/M, gamma = (1-lambda)/(M-1).
    double lambda = 0.0;
    double gamma = 0.0;
    double xi = 1e-4;
    int max_iters = 50000;
    /// Relative fixed-point residual required alongside the xi test.
    double residual_tol = 1e-3;
    /// Positive: fixed multiplier applied to the whole objective inside the
    /// splitting. Non-positive: 3 / (lambda_max(Q^{-1}) lambda_max(Phi)).
    double objective_scale = 0.0;
};

struct MsResult {
    Matrix A;                 // output of the f_M prox branch
    int iterations = 0;
    bool converged = false;
    double objective = 0.0;   // f1 + finite penalties at A
    double lambda = 0.0;      // step sizes actually used
    double gamma = 0.0;
    double objective_scale = 1.0;
    double max_iterate_norm = 0.0;
};

/// f1(A) = -q_value(A, stats, Q).
double surrogate_data_term(const Matrix& A, const EStepStats& stats, const Matrix& Q);

/// f1(A) + reg.value(A), +inf outside a constraint set.
double surrogate_value(const Matrix& A, const EStepStats& stats, const Matrix& Q,
                       const Regularizer& reg);

/// Consensus monotone+skew primal-dual splitting. The consensus group is
/// {f1, reg.terms[0..n-2]}, each activated through its proximity operator;
/// reg.terms.back() is handled by the primal branch, so the returned matrix
/// is always in the range of its prox.
MsResult ms_solve(const EStepStats& stats, const Matrix& Q, const Regularizer& reg,
                  const Matrix& A_init, const MsConfig& cfg = {});

/// Unregularized maximizer of q: Delta Phi^{-1}.
Matrix closed_form_mstep(const EStepStats& stats);

}  // namespace graphem
