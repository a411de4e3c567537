#include "graphem/mstep.hpp"

#include "graphem/prox.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace graphem {

namespace {

constexpr double kAutoScaleTarget = 3.0;

double max_eigenvalue(const Matrix& S) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(S), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

// Evaluates f1 with a cached Q^{-1}.
class DataTerm {
public:
    DataTerm(const EStepStats& stats, const Matrix& Q) : stats_(stats) {
        Eigen::LLT<Matrix> chol(Q);
        if (chol.info() != Eigen::Success) throw std::invalid_argument("Q is not positive definite");
        Qinv_ = chol.solve(Matrix::Identity(Q.rows(), Q.cols()));
    }

    double operator()(const Matrix& A) const {
        const Matrix DAt = stats_.Delta * A.transpose();
        const Matrix inner = stats_.Psi - DAt - DAt.transpose() + A * stats_.Phi * A.transpose();
        return 0.5 * Qinv_.cwiseProduct(inner).sum();
    }

private:
    const EStepStats& stats_;
    Matrix Qinv_;
};

}  // namespace

double surrogate_data_term(const Matrix& A, const EStepStats& stats, const Matrix& Q) {
    return -q_value(A, stats, Q);
}

double surrogate_value(const Matrix& A, const EStepStats& stats, const Matrix& Q,
                       const Regularizer& reg) {
    const double prior = reg.value(A);
    if (!std::isfinite(prior)) return std::numeric_limits<double>::infinity();
    return surrogate_data_term(A, stats, Q) + prior;
}

MsResult ms_solve(const EStepStats& stats, const Matrix& Q, const Regularizer& reg,
                  const Matrix& A_init, const MsConfig& cfg) {
    if (reg.terms.empty()) {
        throw std::invalid_argument("ms_solve needs at least one regularization term (f_M)");
    }
    const int n = static_cast<int>(Q.rows());
    if (A_init.rows() != n || A_init.cols() != n) throw std::invalid_argument("A_init has wrong shape");
    reg.validate(n);

    const int M = 1 + static_cast<int>(reg.terms.size());
    const double lambda = cfg.lambda > 0.0 ? cfg.lambda : 0.9 / M;
    const double gamma = cfg.gamma > 0.0 ? cfg.gamma : (1.0 - lambda) / (M - 1);
    if (!(lambda < 1.0 / M)) throw std::invalid_argument("lambda must lie in (0, 1/M)");
    if (!(gamma >= lambda && gamma <= (1.0 - lambda) / (M - 1) * (1.0 + 1e-12))) {
        throw std::invalid_argument("gamma must lie in [lambda, (1-lambda)/(M-1)]");
    }
    if (!(cfg.xi > 0.0)) throw std::invalid_argument("xi must be positive");

    // The splitting runs on c * F, which has the same minimizers as F. The scale
    // c brings the curvature of c * f1 to O(1), matching the fixed step range.
    double scale = cfg.objective_scale;
    if (!(scale > 0.0)) {
        const double curv = max_eigenvalue(Q.inverse()) * max_eigenvalue(stats.Phi);
        scale = curv > 0.0 ? kAutoScaleTarget / curv : 1.0;
    }
    EStepStats scaled_stats = stats;
    scaled_stats.Psi *= scale;
    scaled_stats.Delta *= scale;
    scaled_stats.Phi *= scale;
    std::vector<PenaltyTerm> terms = reg.terms;
    for (auto& t : terms) t.kappa *= scale;

    const DataTerm f1(stats, Q);
    const QuadraticProx prox_f1(scaled_stats, Q, 1.0 / gamma);
    const PenaltyTerm& f_last = terms.back();
    const int n_consensus = M - 1;  // f1 and terms[0 .. M-3]

    // prox_{gamma f*}(W) = W - gamma prox_{f/gamma}(W/gamma)
    auto dual_prox = [&](int m, const Matrix& W) -> Matrix {
        const Matrix scaled = W / gamma;
        const Matrix p = m == 0 ? prox_f1(scaled) : prox_term(terms[m - 1], scaled, 1.0 / gamma);
        return W - gamma * p;
    };
    auto objective = [&](const Matrix& A) { return f1(A) + reg.penalty_value(A); };

    std::vector<Matrix> V(M, A_init);
    std::vector<Matrix> W(M), Aux(M);
    MsResult res;
    res.lambda = lambda;
    res.gamma = gamma;
    res.objective_scale = scale;
    double prev = std::numeric_limits<double>::quiet_NaN();

    for (int it = 1; it <= cfg.max_iters; ++it) {
        Matrix sumV = Matrix::Zero(n, n);
        for (int m = 0; m < n_consensus; ++m) sumV += V[m];
        for (int m = 0; m < n_consensus; ++m) W[m] = V[m] + gamma * V[M - 1];
        W[M - 1] = V[M - 1] - gamma * sumV;

        for (int m = 0; m < n_consensus; ++m) Aux[m] = dual_prox(m, W[m]);
        Aux[M - 1] = prox_term(f_last, W[M - 1], gamma);

        Matrix sumA = Matrix::Zero(n, n);
        for (int m = 0; m < n_consensus; ++m) sumA += Aux[m];
        double step_sq = 0.0;
        double norm_sq = 0.0;
        for (int m = 0; m < M; ++m) {
            const Matrix Z = m < n_consensus ? Matrix(Aux[m] + gamma * Aux[M - 1])
                                             : Matrix(Aux[M - 1] - gamma * sumA);
            const Matrix step = Z - W[m];
            V[m] += step;
            step_sq += step.squaredNorm();
            norm_sq += V[m].squaredNorm();
        }

        res.iterations = it;
        res.max_iterate_norm = std::max(res.max_iterate_norm, Aux[M - 1].norm());
        const double obj = objective(Aux[M - 1]);
        if (!std::isfinite(obj)) throw NumericalError("M-step iterates diverged");
        // Objective stabilization, guarded by the fixed-point residual so that a
        // stalled prox branch (e.g. thresholded to zero) does not stop early.
        const bool stable = it > 1 && std::abs(obj - prev) <= cfg.xi;
        const bool settled = std::sqrt(step_sq) <= cfg.residual_tol * std::max(1.0, std::sqrt(norm_sq));
        prev = obj;
        if (stable && settled) {
            res.converged = true;
            break;
        }
    }
    res.A = Aux[M - 1];
    res.objective = prev;
    return res;
}

Matrix closed_form_mstep(const EStepStats& stats) {
    return right_solve_spd(stats.Phi, stats.Delta);
}

}  // namespace graphem
