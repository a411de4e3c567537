#include "graphem/estep.hpp"

#include <cmath>
#include <limits>

namespace graphem {

EStepStats estep_stats(const SmootherOutput& smooth, const Matrix& A_ref) {
    const int K = smooth.K();
    const auto nx = smooth.m.front().size();
    EStepStats st;
    st.Psi = Matrix::Zero(nx, nx);
    st.Delta = Matrix::Zero(nx, nx);
    st.Phi = Matrix::Zero(nx, nx);
    st.K = K;
    st.A_ref = A_ref;
    for (int k = 1; k <= K; ++k) {
        const Vector& mk = smooth.m[k];
        const Vector& mk1 = smooth.m[k - 1];
        st.Psi += smooth.P[k] + mk * mk.transpose();
        st.Delta += smooth.P[k] * smooth.G[k - 1].transpose() + mk * mk1.transpose();
        st.Phi += smooth.P[k - 1] + mk1 * mk1.transpose();
    }
    st.Psi = symmetrize(st.Psi);
    st.Phi = symmetrize(st.Phi);
    return st;
}

EStepStats run_estep(const ModelParams& params, const Observations& ys, const Matrix& A) {
    const FilterOutput filt = kalman_filter(params, A, ys);
    const SmootherOutput smooth = rts_smoother(params, A, filt);
    return estep_stats(smooth, A);
}

double q_value(const Matrix& A, const EStepStats& stats, const Matrix& Q) {
    Eigen::LLT<Matrix> chol(Q);
    if (chol.info() != Eigen::Success) throw std::invalid_argument("Q is not positive definite");
    const Matrix inner = stats.Psi - stats.Delta * A.transpose() - A * stats.Delta.transpose() +
                         A * stats.Phi * A.transpose();
    return -0.5 * chol.solve(inner).trace();
}

Matrix q_gradient(const Matrix& A, const EStepStats& stats, const Matrix& Q) {
    Eigen::LLT<Matrix> chol(Q);
    if (chol.info() != Eigen::Success) throw std::invalid_argument("Q is not positive definite");
    return chol.solve(stats.Delta - A * stats.Phi);
}

double map_loss(const Matrix& A, const ModelParams& params, const Observations& ys,
                const Regularizer& reg) {
    const double prior = reg.value(A);
    if (!std::isfinite(prior)) return std::numeric_limits<double>::infinity();
    return neg_log_likelihood(kalman_filter(params, A, ys)) + prior;
}

}  // namespace graphem
