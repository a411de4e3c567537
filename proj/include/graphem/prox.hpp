#pragma once

// Proximity operators: prox_{theta f}(A) = argmin_X theta f(X) + 1/2 ||X - A||_F^2.

#include "graphem/estep.hpp"
#include "graphem/regularizer.hpp"

namespace graphem {

/// Closed-form prox of a penalty term (L1, BlockL21, Gaussian, ElasticNet, Zero)
/// with effective scale theta * kappa.
Matrix prox_penalty(const PenaltyTerm& term, const Matrix& A, double theta);

/// Euclidean projection onto a constraint set (SpectralBall, BoxRange,
/// FrobeniusBall, SupportMask).
Matrix project_constraint(const PenaltyTerm& term, const Matrix& A);

/// Dispatches to prox_penalty or project_constraint.
Matrix prox_term(const PenaltyTerm& term, const Matrix& A, double theta);

/// Prox of theta * f1 where f1(X) = 1/2 tr(Q^{-1}(Psi - Delta X^T - X Delta^T + X Phi X^T)).
///
/// The optimality condition theta Q^{-1} X Phi + X = A + theta Q^{-1} Delta is a
/// Sylvester equation with symmetric coefficients. For Q = sigma^2 I it reduces
/// to X = (theta/sigma^2 Delta + A)(theta/sigma^2 Phi + I)^{-1}; otherwise both
/// coefficients are diagonalized once and the equation is solved entrywise in
/// the eigenbases. Factorizations are cached per (stats, Q, theta).
class QuadraticProx {
public:
    enum class Path { Auto, Isotropic, General };

    QuadraticProx(const EStepStats& stats, const Matrix& Q, double theta, Path path = Path::Auto);

    Matrix operator()(const Matrix& A) const;
    bool isotropic() const { return isotropic_; }

private:
    double theta_;
    bool isotropic_ = false;
    Matrix rhs_shift_;  // theta Q^{-1} Delta
    // isotropic path
    Eigen::LLT<Matrix> shifted_phi_;  // theta/sigma^2 Phi + I
    // general path
    Matrix U_;      // eigenvectors of Q^{-1}
    Vector d_;      // eigenvalues of Q^{-1}
    Matrix V_;      // eigenvectors of Phi
    Vector e_;      // eigenvalues of Phi
};

Matrix prox_quadratic(const Matrix& A, double theta, const EStepStats& stats, const Matrix& Q);

/// Returns sigma^2 if Q == sigma^2 I exactly, otherwise a negative value.
double isotropic_variance(const Matrix& Q);

}  // namespace graphem
