#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace graphem {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when a factorization fails inside a recursion. Carries the step
/// index (1-based time step, or -1 when not tied to a step).
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, int step = -1)
        : std::runtime_error(what), step_(step) {}
    int step() const noexcept { return step_; }

private:
    int step_;
};

inline Matrix symmetrize(const Matrix& P) { return 0.5 * (P + P.transpose()); }

inline bool is_positive_definite(const Matrix& M) {
    if (M.rows() != M.cols() || M.rows() == 0) return false;
    if (!M.allFinite()) return false;
    Eigen::LLT<Matrix> llt(M);
    return llt.info() == Eigen::Success;
}

/// Throws std::invalid_argument naming `name` unless M is symmetric PD.
void require_spd(const Matrix& M, const std::string& name);

/// Largest singular value.
double spectral_norm(const Matrix& A);

/// Smallest eigenvalue of the symmetric part of M.
double min_eigenvalue(const Matrix& M);

/// Solve X * M = B for X with M symmetric PD (X = B M^{-1}). Adds diagonal
/// jitter of 1e-10 * trace(M)/n once when the factorization fails; sets
/// *jittered accordingly. Throws NumericalError if still not PD.
Matrix right_solve_spd(const Matrix& M, const Matrix& B, bool* jittered = nullptr);

}  // namespace graphem
