#include "graphem/linalg.hpp"

namespace graphem {

void require_spd(const Matrix& M, const std::string& name) {
    if (M.rows() != M.cols()) {
        throw std::invalid_argument(name + " must be square");
    }
    if (!M.allFinite()) {
        throw std::invalid_argument(name + " has non-finite entries");
    }
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + M.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument(name + " is not symmetric");
    }
    if (!is_positive_definite(M)) {
        throw std::invalid_argument(name + " is not positive definite");
    }
}

double spectral_norm(const Matrix& A) {
    if (A.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(A);
    return svd.singularValues()(0);
}

double min_eigenvalue(const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(M), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

Matrix right_solve_spd(const Matrix& M, const Matrix& B, bool* jittered) {
    if (jittered) *jittered = false;
    Eigen::LLT<Matrix> llt(M);
    if (llt.info() != Eigen::Success) {
        const double n = static_cast<double>(M.rows());
        const double jitter = 1e-10 * std::max(M.trace(), 1e-300) / n;
        Matrix Mj = M;
        Mj.diagonal().array() += jitter;
        llt.compute(Mj);
        if (llt.info() != Eigen::Success) {
            throw NumericalError("matrix is not positive definite even after jitter");
        }
        if (jittered) *jittered = true;
    }
    // X M = B  <=>  M X^T = B^T (M symmetric)
    return llt.solve(B.transpose()).transpose();
}

}  // namespace graphem
