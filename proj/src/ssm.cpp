#include "graphem/ssm.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace graphem {

void ModelParams::validate() const {
    const int nx = state_dim();
    if (nx <= 0) throw std::invalid_argument("Q must be a non-empty square matrix");
    if (K <= 0) throw std::invalid_argument("K must be positive");
    require_spd(Q, "Q");
    require_spd(P0, "P0");
    if (x0_mean.size() != nx) throw std::invalid_argument("x0_mean has wrong dimension");
    if (H.size() != 1 && H.size() != static_cast<size_t>(K)) {
        throw std::invalid_argument("H must hold 1 or K matrices");
    }
    if (R.size() != 1 && R.size() != static_cast<size_t>(K)) {
        throw std::invalid_argument("R must hold 1 or K matrices");
    }
    const int ny = obs_dim();
    if (ny <= 0) throw std::invalid_argument("H must have at least one row");
    for (size_t i = 0; i < H.size(); ++i) {
        if (H[i].rows() != ny || H[i].cols() != nx) {
            throw std::invalid_argument("H[" + std::to_string(i) + "] has wrong shape");
        }
    }
    for (size_t i = 0; i < R.size(); ++i) {
        if (R[i].rows() != ny) {
            throw std::invalid_argument("R[" + std::to_string(i) + "] has wrong shape");
        }
        require_spd(R[i], "R[" + std::to_string(i) + "]");
    }
}

ModelParams ModelParams::isotropic(int nx, const Matrix& H, double sigma_q, double sigma_r,
                                   double sigma_p, int K) {
    ModelParams p;
    const auto ny = H.rows();
    p.Q = sigma_q * sigma_q * Matrix::Identity(nx, nx);
    p.H = {H};
    p.R = {sigma_r * sigma_r * Matrix::Identity(ny, ny)};
    p.x0_mean = Vector::Zero(nx);
    p.P0 = sigma_p * sigma_p * Matrix::Identity(nx, nx);
    p.K = K;
    return p;
}

namespace {

Vector draw_gaussian(const Eigen::LLT<Matrix>& chol, std::mt19937_64& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    const auto n = chol.matrixL().rows();
    Vector z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = n01(rng);
    return chol.matrixL() * z;
}

}  // namespace

Trajectory simulate(const ModelParams& params, const Matrix& A, std::uint64_t seed) {
    params.validate();
    const int nx = params.state_dim();
    if (A.rows() != nx || A.cols() != nx) throw std::invalid_argument("A has wrong shape");
    if (!A.allFinite()) throw std::invalid_argument("A has non-finite entries");

    std::mt19937_64 rng(seed);
    Eigen::LLT<Matrix> chol_p0(params.P0);
    Eigen::LLT<Matrix> chol_q(params.Q);
    std::vector<Eigen::LLT<Matrix>> chol_r;
    chol_r.reserve(params.R.size());
    for (const auto& R : params.R) chol_r.emplace_back(R);

    Trajectory traj;
    traj.seed = seed;
    traj.states.reserve(params.K + 1);
    traj.observations.reserve(params.K);
    traj.states.push_back(params.x0_mean + draw_gaussian(chol_p0, rng));
    for (int k = 1; k <= params.K; ++k) {
        Vector x = A * traj.states.back() + draw_gaussian(chol_q, rng);
        const auto& cr = chol_r.size() == 1 ? chol_r.front() : chol_r[k - 1];
        traj.observations.push_back(params.H_at(k) * x + draw_gaussian(cr, rng));
        traj.states.push_back(std::move(x));
    }
    return traj;
}

FilterOutput kalman_filter(const ModelParams& params, const Matrix& A, const Observations& ys) {
    const int K = static_cast<int>(ys.size());
    const int nx = params.state_dim();
    if (A.rows() != nx || A.cols() != nx) throw std::invalid_argument("A has wrong shape");
    if (params.H.size() != 1 && static_cast<int>(params.H.size()) < K) {
        throw std::invalid_argument("fewer observation matrices than observations");
    }
    if (params.R.size() != 1 && static_cast<int>(params.R.size()) < K) {
        throw std::invalid_argument("fewer observation covariances than observations");
    }

    FilterOutput out;
    out.m_pred.resize(K + 1);
    out.P_pred.resize(K + 1);
    out.m.resize(K + 1);
    out.P.resize(K + 1);
    out.v.resize(K + 1);
    out.S.resize(K + 1);
    out.gain.resize(K + 1);
    out.m[0] = params.x0_mean;
    out.P[0] = params.P0;

    for (int k = 1; k <= K; ++k) {
        const Matrix& H = params.H_at(k);
        if (ys[k - 1].size() != H.rows()) {
            throw std::invalid_argument("observation " + std::to_string(k) + " has wrong dimension");
        }
        out.m_pred[k] = A * out.m[k - 1];
        out.P_pred[k] = symmetrize(A * out.P[k - 1] * A.transpose() + params.Q);

        out.v[k] = ys[k - 1] - H * out.m_pred[k];
        out.S[k] = symmetrize(H * out.P_pred[k] * H.transpose() + params.R_at(k));
        Eigen::LLT<Matrix> chol(out.S[k]);
        if (chol.info() != Eigen::Success || !out.S[k].allFinite()) {
            throw NumericalError("innovation covariance S_" + std::to_string(k) +
                                     " is not positive definite",
                                 k);
        }
        // K_k = P^- H^T S^{-1}  <=>  S K_k^T = H P^-
        const Matrix PHt = out.P_pred[k] * H.transpose();
        out.gain[k] = chol.solve(PHt.transpose()).transpose();
        out.m[k] = out.m_pred[k] + out.gain[k] * out.v[k];
        out.P[k] = symmetrize(out.P_pred[k] - out.gain[k] * out.S[k] * out.gain[k].transpose());
    }
    return out;
}

SmootherOutput rts_smoother(const ModelParams& params, const Matrix& A, const FilterOutput& filt) {
    const int K = filt.K();
    SmootherOutput out;
    out.m.resize(K + 1);
    out.P.resize(K + 1);
    out.G.resize(K);
    out.m[K] = filt.m[K];
    out.P[K] = filt.P[K];

    for (int k = K - 1; k >= 0; --k) {
        const Vector m_pred = A * filt.m[k];
        const Matrix P_pred = symmetrize(A * filt.P[k] * A.transpose() + params.Q);
        bool jittered = false;
        // G_k = P_k A^T (P^-_{k+1})^{-1}
        out.G[k] = right_solve_spd(P_pred, filt.P[k] * A.transpose(), &jittered);
        if (jittered) ++out.jitter_count;
        out.m[k] = filt.m[k] + out.G[k] * (out.m[k + 1] - m_pred);
        out.P[k] = symmetrize(filt.P[k] + out.G[k] * (out.P[k + 1] - P_pred) * out.G[k].transpose());
    }
    return out;
}

double neg_log_likelihood(const FilterOutput& filt) {
    const double two_pi = 2.0 * std::numbers::pi;
    double total = 0.0;
    for (int k = 1; k <= filt.K(); ++k) {
        const Matrix& S = filt.S[k];
        Eigen::LLT<Matrix> chol(S);
        if (chol.info() != Eigen::Success) {
            throw NumericalError("innovation covariance S_" + std::to_string(k) +
                                     " is not positive definite",
                                 k);
        }
        const Matrix& L = chol.matrixLLT();
        double log_det = static_cast<double>(S.rows()) * std::log(two_pi);
        for (Eigen::Index i = 0; i < L.rows(); ++i) log_det += 2.0 * std::log(L(i, i));
        const Vector w = chol.matrixL().solve(filt.v[k]);
        total += 0.5 * log_det + 0.5 * w.squaredNorm();
    }
    return total;
}

}  // namespace graphem
