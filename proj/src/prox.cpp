#include "graphem/prox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace graphem {

namespace {

// sign(a) max(0, |a| - t), with +0.0 at thresholded positions.
double soft_threshold(double a, double t) {
    const double mag = std::abs(a) - t;
    if (mag <= 0.0) return 0.0;
    return a > 0.0 ? mag : -mag;
}

}  // namespace

Matrix prox_penalty(const PenaltyTerm& term, const Matrix& A, double theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("prox scale must be positive");
    const double t = theta * term.kappa;
    switch (term.kind) {
        case TermKind::L1:
            return A.unaryExpr([t](double a) { return soft_threshold(a, t); });
        case TermKind::BlockL21: {
            Matrix out = A;
            for (const auto& b : term.block_map.blocks) {
                double sq = 0.0;
                for (auto [i, j] : b) sq += A(i, j) * A(i, j);
                const double norm = std::sqrt(sq);
                if (norm <= t) {
                    for (auto [i, j] : b) out(i, j) = 0.0;
                } else {
                    const double scale = 1.0 - t / norm;
                    for (auto [i, j] : b) out(i, j) = scale * A(i, j);
                }
            }
            return out;
        }
        case TermKind::Gaussian: return A / (1.0 + t);
        case TermKind::ElasticNet: {
            const double s = 1.0 + t;
            return A.unaryExpr([s, t](double a) { return soft_threshold(a / s, t / s); });
        }
        case TermKind::Zero: return A;
        default:
            throw std::invalid_argument("prox_penalty: '" + std::string(to_string(term.kind)) +
                                        "' is not a penalty term");
    }
}

Matrix project_constraint(const PenaltyTerm& term, const Matrix& A) {
    switch (term.kind) {
        case TermKind::SpectralBall: {
            Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
            if (svd.info() != Eigen::Success) throw NumericalError("SVD failed in spectral projection");
            const Vector& s = svd.singularValues();
            if (s.size() == 0 || s(0) <= term.delta) return A;
            const Vector clamped = s.cwiseMin(term.delta);
            return svd.matrixU() * clamped.asDiagonal() * svd.matrixV().transpose();
        }
        case TermKind::BoxRange:
            return A.cwiseMax(term.a_min).cwiseMin(term.a_max);
        case TermKind::FrobeniusBall: {
            const double n = A.norm();
            if (n <= term.delta) return A;
            return A * (term.delta / n);
        }
        case TermKind::SupportMask:
            return term.mask.select(A, Matrix::Zero(A.rows(), A.cols()));
        default:
            throw std::invalid_argument("project_constraint: '" + std::string(to_string(term.kind)) +
                                        "' is not a constraint term");
    }
}

Matrix prox_term(const PenaltyTerm& term, const Matrix& A, double theta) {
    return term.is_constraint() ? project_constraint(term, A) : prox_penalty(term, A, theta);
}

double isotropic_variance(const Matrix& Q) {
    if (Q.rows() != Q.cols() || Q.rows() == 0) return -1.0;
    const double s2 = Q(0, 0);
    if (!(s2 > 0.0)) return -1.0;
    for (Eigen::Index j = 0; j < Q.cols(); ++j)
        for (Eigen::Index i = 0; i < Q.rows(); ++i)
            if (Q(i, j) != (i == j ? s2 : 0.0)) return -1.0;
    return s2;
}

QuadraticProx::QuadraticProx(const EStepStats& stats, const Matrix& Q, double theta, Path path)
    : theta_(theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("prox scale must be positive");
    const auto n = Q.rows();
    if (stats.Phi.rows() != n || stats.Delta.rows() != n) {
        throw std::invalid_argument("E-step statistics do not match Q");
    }
    if (!stats.Phi.allFinite() || !stats.Delta.allFinite()) {
        throw NumericalError("E-step statistics are not finite");
    }
    const double s2 = isotropic_variance(Q);
    isotropic_ = path == Path::Isotropic || (path == Path::Auto && s2 > 0.0);
    if (isotropic_ && !(s2 > 0.0)) throw std::invalid_argument("Q is not isotropic");

    if (isotropic_) {
        const double r = theta / s2;
        rhs_shift_ = r * stats.Delta;
        Matrix M = r * stats.Phi;
        M.diagonal().array() += 1.0;
        shifted_phi_.compute(M);
        if (shifted_phi_.info() != Eigen::Success) {
            throw NumericalError("Phi is not positive semidefinite");
        }
        return;
    }

    Eigen::LLT<Matrix> chol(Q);
    if (chol.info() != Eigen::Success) throw std::invalid_argument("Q is not positive definite");
    rhs_shift_ = theta * chol.solve(stats.Delta);
    Eigen::SelfAdjointEigenSolver<Matrix> eq(symmetrize(Q));
    U_ = eq.eigenvectors();
    d_ = eq.eigenvalues().cwiseInverse();
    Eigen::SelfAdjointEigenSolver<Matrix> ep(symmetrize(stats.Phi));
    V_ = ep.eigenvectors();
    e_ = ep.eigenvalues();
    if (e_.minCoeff() < -1e-10 * std::max(1.0, e_.cwiseAbs().maxCoeff())) {
        throw NumericalError("Phi is not positive semidefinite");
    }
}

Matrix QuadraticProx::operator()(const Matrix& A) const {
    const Matrix C = A + rhs_shift_;
    if (isotropic_) {
        // X (r Phi + I) = C
        return shifted_phi_.solve(C.transpose()).transpose();
    }
    // theta Q^{-1} X Phi + X = C, with Q^{-1} = U diag(d) U^T, Phi = V diag(e) V^T
    Matrix Y = U_.transpose() * C * V_;
    for (Eigen::Index j = 0; j < Y.cols(); ++j)
        for (Eigen::Index i = 0; i < Y.rows(); ++i)
            Y(i, j) /= 1.0 + theta_ * d_(i) * std::max(e_(j), 0.0);
    return U_ * Y * V_.transpose();
}

Matrix prox_quadratic(const Matrix& A, double theta, const EStepStats& stats, const Matrix& Q) {
    return QuadraticProx(stats, Q, theta)(A);
}

}  // namespace graphem
