#include "graphem/graphem.hpp"

#include "graphem/estep.hpp"
#include "graphem/log.hpp"
#include "graphem/metrics.hpp"
#include "graphem/prox.hpp"

#include <cctype>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace graphem {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::GraphEM: return "graphem";
        case Method::MLEM: return "mlem";
        case Method::StableEM: return "stableem";
        case Method::OracleEM: return "oracleem";
    }
    return "unknown";
}

Method method_from_string(std::string_view name) {
    std::string s(name);
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (auto m : {Method::GraphEM, Method::MLEM, Method::StableEM, Method::OracleEM}) {
        if (to_string(m) == s) return m;
    }
    throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

void FitConfig::validate(int nx) const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (!(xi > 0.0)) throw std::invalid_argument("xi must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    if (max_em_iters < 1) throw std::invalid_argument("max_em_iters must be at least 1");
    if (A_init && (A_init->rows() != nx || A_init->cols() != nx)) {
        throw std::invalid_argument("A_init has wrong shape");
    }
    if (method == Method::GraphEM) {
        if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be nonnegative");
        if (penalty == SparsityPenalty::BlockL21) blocks.validate(nx);
    }
    if (method == Method::OracleEM) {
        if (!support_mask) throw std::invalid_argument("OracleEM requires a support mask");
        if (support_mask->rows() != nx || support_mask->cols() != nx) {
            throw std::invalid_argument("support mask has wrong shape");
        }
    }
}

Regularizer method_regularizer(const FitConfig& cfg) {
    Regularizer reg;
    switch (cfg.method) {
        case Method::GraphEM:
            reg.terms.push_back(PenaltyTerm::spectral_ball(cfg.delta));
            reg.terms.push_back(cfg.penalty == SparsityPenalty::L1
                                    ? PenaltyTerm::l1(cfg.kappa)
                                    : PenaltyTerm::block_l21(cfg.kappa, cfg.blocks));
            break;
        case Method::StableEM:
            reg.terms.push_back(PenaltyTerm::spectral_ball(cfg.delta));
            reg.terms.push_back(PenaltyTerm::zero());
            break;
        case Method::OracleEM:
            reg.terms.push_back(PenaltyTerm::support_mask(*cfg.support_mask));
            break;
        case Method::MLEM: break;
    }
    return reg;
}

Matrix init_matrix(int nx, std::uint64_t seed, double delta) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    Matrix A = Matrix::Zero(nx, nx);
    for (int i = 0; i < nx; ++i) A(i, i) = unif(rng);
    return project_constraint(PenaltyTerm::spectral_ball(delta), A);
}

namespace {

// Makes the accepted iterate spectral-feasible. GraphEM rescales radially so
// the support produced by the sparsity prox is kept; StableEM projects.
Matrix accept_iterate(const FitConfig& cfg, Matrix A) {
    if (cfg.method == Method::StableEM) {
        return project_constraint(PenaltyTerm::spectral_ball(cfg.delta), A);
    }
    if (cfg.method == Method::GraphEM) {
        const double s = spectral_norm(A);
        if (s > cfg.delta) A *= cfg.delta / s;
    }
    return A;
}

}  // namespace

FitResult fit(const ModelParams& params, const Observations& ys, const FitConfig& cfg) {
    params.validate();
    const int nx = params.state_dim();
    cfg.validate(nx);
    if (static_cast<int>(ys.size()) != params.K) {
        throw std::invalid_argument("number of observations does not match K");
    }

    const Regularizer reg = method_regularizer(cfg);
    MsConfig ms = cfg.ms;
    ms.xi = cfg.xi;

    FitResult res;
    Matrix A = cfg.A_init ? *cfg.A_init : init_matrix(nx, cfg.init_seed, cfg.delta);
    if (cfg.method == Method::OracleEM) A = project_constraint(reg.terms.back(), A);

    auto record = [&](const Matrix& Ai, const FilterOutput& filt) {
        res.loss_trace.push_back(neg_log_likelihood(filt) + reg.value(Ai));
        if (cfg.A_true) res.rmse_trace.push_back(rmse(Ai, *cfg.A_true));
    };

    for (int i = 0; i < cfg.max_em_iters; ++i) {
        Matrix A_next;
        try {
            const FilterOutput filt = kalman_filter(params, A, ys);
            record(A, filt);
            const SmootherOutput smooth = rts_smoother(params, A, filt);
            const EStepStats stats = estep_stats(smooth, A);
            if (cfg.method == Method::MLEM) {
                A_next = closed_form_mstep(stats);
            } else {
                const MsResult ms_res = ms_solve(stats, params.Q, reg, A, ms);
                res.mstep_iters.push_back(ms_res.iterations);
                if (!ms_res.converged) {
                    ++res.mstep_nonconverged;
                    log::warn("EM iteration ", i, ": M-step stopped at max_iters=", ms.max_iters,
                              " without reaching xi=", ms.xi);
                }
                A_next = accept_iterate(cfg, ms_res.A);
            }
        } catch (const NumericalError& e) {
            throw NumericalError("EM iteration " + std::to_string(i) + ": " + e.what(), e.step());
        }
        const double change = (A_next - A).norm();
        const double ref = A.norm();
        A = std::move(A_next);
        ++res.em_iters;
        log::debug("EM iteration ", i, ": relative change ", ref > 0 ? change / ref : change);
        if (change <= cfg.epsilon * ref) {
            res.converged = true;
            break;
        }
    }

    try {
        const FilterOutput filt = kalman_filter(params, A, ys);
        record(A, filt);
        res.smoother = rts_smoother(params, A, filt);
    } catch (const NumericalError& e) {
        throw NumericalError("final E-step: " + std::string(e.what()), e.step());
    }
    res.A_hat = std::move(A);
    return res;
}

KappaSelection select_kappa(const ModelParams& params, const Observations& ys, FitConfig cfg,
                            const std::vector<double>& kappas, const Matrix& A_true) {
    if (kappas.empty()) throw std::invalid_argument("kappa grid is empty");
    KappaSelection best;
    double best_acc = -1.0;
    double best_rmse = 0.0;
    for (double k : kappas) {
        cfg.kappa = k;
        FitResult r = fit(params, ys, cfg);
        const double acc = detection(r.A_hat, A_true).accuracy;
        const double err = rmse(r.A_hat, A_true);
        best.accuracy.push_back(acc);
        if (acc > best_acc || (acc == best_acc && err < best_rmse)) {
            best_acc = acc;
            best_rmse = err;
            best.kappa = k;
            best.result = std::move(r);
        }
    }
    return best;
}

}  // namespace graphem
