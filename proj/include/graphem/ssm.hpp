#pragma once

// Linear-Gaussian state-space model
//
//   x_k = A x_{k-1} + q_k,   q_k ~ N(0, Q)
//   y_k = H_k x_k + r_k,     r_k ~ N(0, R_k),   k = 1..K
//   x_0 ~ N(x0_mean, P0)
//
// with exact Kalman filtering, RTS smoothing and likelihood evaluation.

#include "graphem/linalg.hpp"

#include <cstdint>
#include <vector>

namespace graphem {

using Observations = std::vector<Vector>;

struct ModelParams {
    Matrix Q;
    /// One entry (constant over k) or K entries (time-varying, H[k-1] = H_k).
    std::vector<Matrix> H;
    std::vector<Matrix> R;
    Vector x0_mean;
    Matrix P0;
    int K = 0;

    int state_dim() const { return static_cast<int>(Q.rows()); }
    int obs_dim() const { return H.empty() ? 0 : static_cast<int>(H.front().rows()); }

    /// Observation matrix at time step k in 1..K (constant inputs broadcast).
    const Matrix& H_at(int k) const { return H.size() == 1 ? H.front() : H[k - 1]; }
    const Matrix& R_at(int k) const { return R.size() == 1 ? R.front() : R[k - 1]; }

    /// Throws std::invalid_argument naming the first offending field.
    void validate() const;

    /// Constant-H, constant-R model with isotropic covariances.
    static ModelParams isotropic(int nx, const Matrix& H, double sigma_q, double sigma_r,
                                 double sigma_p, int K);
};

struct Trajectory {
    std::vector<Vector> states;  // x_0..x_K
    Observations observations;   // y_1..y_K (observations[k-1] = y_k)
    std::uint64_t seed = 0;
};

/// Per-step quantities are stored at index k (1..K); index 0 of the
/// predicted/innovation/gain arrays is left empty. m[0], P[0] hold the prior.
struct FilterOutput {
    std::vector<Vector> m_pred;
    std::vector<Matrix> P_pred;
    std::vector<Vector> m;
    std::vector<Matrix> P;
    std::vector<Vector> v;  // innovations
    std::vector<Matrix> S;  // innovation covariances
    std::vector<Matrix> gain;

    int K() const { return static_cast<int>(m.size()) - 1; }
};

struct SmootherOutput {
    std::vector<Vector> m;  // k = 0..K
    std::vector<Matrix> P;  // k = 0..K
    std::vector<Matrix> G;  // k = 0..K-1
    int jitter_count = 0;   // backward steps that needed diagonal jitter

    int K() const { return static_cast<int>(m.size()) - 1; }
};

Trajectory simulate(const ModelParams& params, const Matrix& A, std::uint64_t seed);

FilterOutput kalman_filter(const ModelParams& params, const Matrix& A, const Observations& ys);

SmootherOutput rts_smoother(const ModelParams& params, const Matrix& A, const FilterOutput& filt);

/// -log p(y_1:K | A), accumulated from the innovations.
double neg_log_likelihood(const FilterOutput& filt);

}  // namespace graphem
