#pragma once

// Outer EM loop estimating the transition matrix A.
//
// Each iteration runs the Kalman filter and RTS smoother at the current
// iterate, forms the E-step statistics, and minimizes the regularized
// surrogate. Method variants differ only in the M-step:
//
//   GraphEM   consensus MS solver, prior = spectral ball + kappa * (L1 | L21)
//   StableEM  consensus MS solver, prior = spectral ball
//   OracleEM  consensus MS solver, prior = known support
//   MLEM      closed form Delta Phi^{-1}

#include "graphem/mstep.hpp"
#include "graphem/regularizer.hpp"
#include "graphem/ssm.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace graphem {

enum class Method { GraphEM, MLEM, StableEM, OracleEM };
enum class SparsityPenalty { L1, BlockL21 };

std::string_view to_string(Method m);
Method method_from_string(std::string_view name);

struct FitConfig {
    Method method = Method::GraphEM;
    double kappa = 0.0;
    double delta = 0.99;
    double epsilon = 1e-3;
    double xi = 1e-4;
    int max_em_iters = 200;
    std::uint64_t init_seed = 0;
    std::optional<Matrix> A_init;
    std::optional<BoolMatrix> support_mask;  // OracleEM
    SparsityPenalty penalty = SparsityPenalty::L1;
    BlockMap blocks;                         // BlockL21
    MsConfig ms;                             // ms.xi is overridden by xi
    std::optional<Matrix> A_true;            // enables rmse_trace

    /// Throws std::invalid_argument on out-of-range values or missing
    /// method-specific fields.
    void validate(int nx) const;
};

struct FitResult {
    Matrix A_hat;
    std::vector<double> loss_trace;  // map loss at A^(0) .. A^(em_iters)
    std::vector<double> rmse_trace;  // same indexing, when A_true is given
    int em_iters = 0;
    bool converged = false;
    SmootherOutput smoother;         // at A_hat
    std::vector<int> mstep_iters;
    int mstep_nonconverged = 0;
};

/// The MAP prior a method minimizes against (empty for MLEM).
Regularizer method_regularizer(const FitConfig& cfg);

FitResult fit(const ModelParams& params, const Observations& ys, const FitConfig& cfg);

/// Random diagonal matrix with spectral norm <= delta, deterministic in seed.
Matrix init_matrix(int nx, std::uint64_t seed, double delta);

struct KappaSelection {
    double kappa = 0.0;
    FitResult result;
    std::vector<double> accuracy;  // per candidate, in input order
};

/// Grid search over kappa maximizing edge-detection accuracy against A_true
/// (ties broken by lower RMSE).
KappaSelection select_kappa(const ModelParams& params, const Observations& ys, FitConfig cfg,
                            const std::vector<double>& kappas, const Matrix& A_true);

}  // namespace graphem
