#pragma once

// E-step: sufficient statistics of the smoothing posterior and the quadratic
// surrogate they define,
//
//   q(A) = -1/2 tr(Q^{-1} (Psi - Delta A^T - A Delta^T + A Phi A^T)).

#include "graphem/regularizer.hpp"
#include "graphem/ssm.hpp"

namespace graphem {

struct EStepStats {
    Matrix Psi;    // sum_{k=1..K} P^s_k + m^s_k m^s_k^T
    Matrix Delta;  // sum_{k=1..K} P^s_k G_{k-1}^T + m^s_k m^s_{k-1}^T
    Matrix Phi;    // sum_{k=1..K} P^s_{k-1} + m^s_{k-1} m^s_{k-1}^T
    int K = 0;
    Matrix A_ref;
};

EStepStats estep_stats(const SmootherOutput& smooth, const Matrix& A_ref);

/// Runs filter + smoother at A and returns the statistics.
EStepStats run_estep(const ModelParams& params, const Observations& ys, const Matrix& A);

/// Surrogate log-likelihood term, additive constant fixed to zero.
double q_value(const Matrix& A, const EStepStats& stats, const Matrix& Q);

/// Gradient of q_value with respect to A: Q^{-1}(Delta - A Phi).
Matrix q_gradient(const Matrix& A, const EStepStats& stats, const Matrix& Q);

/// MAP loss: -log p(y_1:K | A) + regularizer(A). +inf if A violates a constraint.
double map_loss(const Matrix& A, const ModelParams& params, const Observations& ys,
                const Regularizer& reg);

}  // namespace graphem
