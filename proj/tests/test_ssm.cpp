#include "oracles.hpp"

#include "graphem/ssm.hpp"

#include <doctest.h>

#include <cmath>

using namespace graphem;

namespace {

ModelParams scalar_model(int K) {
    ModelParams p;
    p.Q = Matrix::Constant(1, 1, 1.0);
    p.H = {Matrix::Constant(1, 1, 1.0)};
    p.R = {Matrix::Constant(1, 1, 1.0)};
    p.P0 = Matrix::Constant(1, 1, 1.0);
    p.x0_mean = Vector::Zero(1);
    p.K = K;
    return p;
}

double max_abs(const Matrix& M) { return M.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("ssm") {

TEST_CASE("simulate is deterministic in the seed") {
    std::mt19937_64 rng(3);
    const ModelParams p = oracle::random_model(3, 2, 20, rng);
    const Matrix A = oracle::random_stable(3, rng);
    const Trajectory a = simulate(p, A, 42), b = simulate(p, A, 42), c = simulate(p, A, 43);
    REQUIRE(a.states.size() == 21);
    REQUIRE(a.observations.size() == 20);
    for (int k = 0; k <= 20; ++k) CHECK(a.states[k] == b.states[k]);
    for (int k = 0; k < 20; ++k) CHECK(a.observations[k] == b.observations[k]);
    CHECK(a.states[5] != c.states[5]);
}

TEST_CASE("simulated white process has the prescribed variance") {
    ModelParams p = scalar_model(100000);
    p.Q(0, 0) = 4.0;
    const Trajectory t = simulate(p, Matrix::Zero(1, 1), 7);
    double s = 0.0, s2 = 0.0;
    for (int k = 1; k <= p.K; ++k) {
        s += t.states[k](0);
        s2 += t.states[k](0) * t.states[k](0);
    }
    const double mean = s / p.K;
    const double var = s2 / p.K - mean * mean;
    CHECK(std::abs(var - 4.0) < 0.05 * 4.0);
}

TEST_CASE("scalar filter step by hand") {
    ModelParams p = scalar_model(1);
    const Matrix A = Matrix::Constant(1, 1, 0.5);
    const FilterOutput f = kalman_filter(p, A, {Vector::Constant(1, 2.0)});
    CHECK(f.P_pred[1](0, 0) == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(f.S[1](0, 0) == doctest::Approx(2.25).epsilon(1e-14));
    CHECK(f.gain[1](0, 0) == doctest::Approx(1.25 / 2.25).epsilon(1e-14));
    CHECK(f.m[1](0) == doctest::Approx(2.0 * 1.25 / 2.25).epsilon(1e-14));
    const double nll = 0.5 * std::log(2.0 * M_PI * 2.25) + 0.5 * 4.0 / 2.25;
    CHECK(neg_log_likelihood(f) == doctest::Approx(nll).epsilon(1e-14));
}

TEST_CASE("perfect observations pin the filtered mean") {
    std::mt19937_64 rng(5);
    ModelParams p = oracle::random_model(3, 3, 15, rng);
    p.H = {Matrix::Identity(3, 3)};
    p.R = {1e-12 * Matrix::Identity(3, 3)};
    const Matrix A = oracle::random_stable(3, rng);
    const Trajectory t = simulate(p, A, 9);
    const FilterOutput f = kalman_filter(p, A, t.observations);
    for (int k = 1; k <= p.K; ++k) CHECK((f.m[k] - t.observations[k - 1]).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("filter and smoother match joint-Gaussian conditioning") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const ModelParams p = oracle::random_model(2, 2, 5, rng);
        const Matrix A = oracle::random_stable(2, rng, 0.9);
        const Trajectory t = simulate(p, A, 100 + trial);
        const FilterOutput f = kalman_filter(p, A, t.observations);
        const SmootherOutput s = rts_smoother(p, A, f);
        const auto g = oracle::joint_gaussian(p, A);
        for (int k = 1; k <= p.K; ++k) {
            const auto post = oracle::condition_states(g, t.observations, k);
            CHECK(max_abs(f.m[k] - post.mean.segment(k * 2, 2)) < 1e-8);
            CHECK(max_abs(f.P[k] - post.cov.block(k * 2, k * 2, 2, 2)) < 1e-8);
        }
        const auto full = oracle::condition_states(g, t.observations, p.K);
        for (int k = 0; k <= p.K; ++k) {
            CHECK(max_abs(s.m[k] - full.mean.segment(k * 2, 2)) < 1e-8);
            CHECK(max_abs(s.P[k] - full.cov.block(k * 2, k * 2, 2, 2)) < 1e-8);
        }
        CHECK(neg_log_likelihood(f) == doctest::Approx(oracle::dense_nll(g, t.observations)).epsilon(1e-10));
    }
}

TEST_CASE("smoother starts at the last filtered moments") {
    std::mt19937_64 rng(12);
    const ModelParams p = oracle::random_model(3, 2, 8, rng);
    const Matrix A = oracle::random_stable(3, rng);
    const Trajectory t = simulate(p, A, 1);
    const FilterOutput f = kalman_filter(p, A, t.observations);
    const SmootherOutput s = rts_smoother(p, A, f);
    CHECK(s.m[p.K] == f.m[p.K]);
    CHECK(s.P[p.K] == f.P[p.K]);
}

TEST_CASE("smoothing never increases the variance") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const ModelParams p = oracle::random_model(3, 2, 10, rng);
        const Matrix A = oracle::random_stable(3, rng, 0.95);
        const Trajectory t = simulate(p, A, trial);
        const FilterOutput f = kalman_filter(p, A, t.observations);
        const SmootherOutput s = rts_smoother(p, A, f);
        for (int k = 0; k <= p.K; ++k) CHECK(s.P[k].trace() <= f.P[k].trace() + 1e-10);
    }
}

TEST_CASE("zero innovations leave only the log-determinant") {
    std::mt19937_64 rng(14);
    const ModelParams p = oracle::random_model(2, 2, 6, rng);
    const Matrix A = oracle::random_stable(2, rng);
    // y_k = H m^-_k: feed the predicted observation step by step
    Observations ys;
    Vector m = p.x0_mean;
    Matrix P = p.P0;
    double expected = 0.0;
    for (int k = 1; k <= p.K; ++k) {
        const Vector mp = A * m;
        const Matrix Pp = A * P * A.transpose() + p.Q;
        const Matrix S = p.H[0] * Pp * p.H[0].transpose() + p.R[0];
        ys.push_back(p.H[0] * mp);
        expected += 0.5 * std::log((2.0 * M_PI * S).determinant());
        const Matrix G = Pp * p.H[0].transpose() * S.inverse();
        m = mp;
        P = Pp - G * S * G.transpose();
    }
    const FilterOutput f = kalman_filter(p, A, ys);
    for (int k = 1; k <= p.K; ++k) CHECK(f.v[k].norm() < 1e-12);
    CHECK(neg_log_likelihood(f) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("likelihood matches the dense marginal for K = 4") {
    std::mt19937_64 rng(15);
    const ModelParams p = oracle::random_model(2, 2, 4, rng);
    const Matrix A = oracle::random_stable(2, rng);
    const Trajectory t = simulate(p, A, 2);
    const auto g = oracle::joint_gaussian(p, A);
    CHECK(std::abs(neg_log_likelihood(kalman_filter(p, A, t.observations)) - oracle::dense_nll(g, t.observations)) <
          1e-6);
}

TEST_CASE("stored covariances are symmetric and PSD") {
    std::mt19937_64 rng(16);
    const ModelParams p = oracle::random_model(4, 3, 50, rng);
    const Matrix A = oracle::random_stable(4, rng, 0.97);
    const Trajectory t = simulate(p, A, 3);
    const FilterOutput f = kalman_filter(p, A, t.observations);
    const SmootherOutput s = rts_smoother(p, A, f);
    auto check = [](const Matrix& P) {
        CHECK((P - P.transpose()).norm() == 0.0);
        CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(P).eigenvalues().minCoeff() >= -1e-10);
    };
    for (int k = 0; k <= p.K; ++k) {
        check(f.P[k]);
        check(s.P[k]);
        if (k > 0) {
            check(f.P_pred[k]);
            check(f.S[k]);
        }
    }
}

TEST_CASE("outputs are invariant under an orthogonal change of state basis") {
    std::mt19937_64 rng(17);
    const ModelParams p = oracle::random_model(3, 2, 12, rng);
    const Matrix A = oracle::random_stable(3, rng);
    const Trajectory t = simulate(p, A, 4);
    const Matrix U = Eigen::HouseholderQR<Matrix>(oracle::random_matrix(3, 3, rng)).householderQ();

    ModelParams q = p;
    q.Q = U * p.Q * U.transpose();
    q.P0 = U * p.P0 * U.transpose();
    q.x0_mean = U * p.x0_mean;
    q.H = {p.H[0] * U.transpose()};
    const Matrix B = U * A * U.transpose();

    const FilterOutput f1 = kalman_filter(p, A, t.observations), f2 = kalman_filter(q, B, t.observations);
    const SmootherOutput s1 = rts_smoother(p, A, f1), s2 = rts_smoother(q, B, f2);
    for (int k = 0; k <= p.K; ++k) {
        CHECK(max_abs(U * f1.m[k] - f2.m[k]) < 1e-9);
        CHECK(max_abs(U * f1.P[k] * U.transpose() - f2.P[k]) < 1e-9);
        CHECK(max_abs(U * s1.m[k] - s2.m[k]) < 1e-9);
        CHECK(max_abs(U * s1.P[k] * U.transpose() - s2.P[k]) < 1e-9);
    }
    CHECK(neg_log_likelihood(f1) == doctest::Approx(neg_log_likelihood(f2)).epsilon(1e-12));
}

TEST_CASE("a better-matched observation noise lowers the negative log-likelihood") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const ModelParams p = ModelParams::isotropic(3, Matrix::Identity(3, 3), 0.3, 0.5, 0.1, 400);
        std::mt19937_64 rng(seed);
        const Matrix A = oracle::random_stable(3, rng);
        const Trajectory t = simulate(p, A, seed);
        ModelParams wrong = p;
        wrong.R = {0.01 * Matrix::Identity(3, 3)};
        CHECK(neg_log_likelihood(kalman_filter(p, A, t.observations)) <
              neg_log_likelihood(kalman_filter(wrong, A, t.observations)));
    }
}

TEST_CASE("time-varying observation matrices are honoured") {
    std::mt19937_64 rng(18);
    ModelParams p = oracle::random_model(2, 2, 5, rng);
    p.H.clear();
    for (int k = 0; k < 5; ++k) p.H.push_back(oracle::random_matrix(2, 2, rng));
    const Matrix A = oracle::random_stable(2, rng);
    const Trajectory t = simulate(p, A, 6);
    const FilterOutput f = kalman_filter(p, A, t.observations);
    const auto g = oracle::joint_gaussian(p, A);
    const auto post = oracle::condition_states(g, t.observations, p.K);
    const SmootherOutput s = rts_smoother(p, A, f);
    for (int k = 0; k <= p.K; ++k) CHECK(max_abs(s.m[k] - post.mean.segment(2 * k, 2)) < 1e-8);
}

TEST_CASE("non-PD innovation covariance names the step") {
    ModelParams p = scalar_model(4);
    p.H = {Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 1e200),
           Matrix::Constant(1, 1, 1.0)};
    Observations ys(4, Vector::Zero(1));
    try {
        kalman_filter(p, Matrix::Constant(1, 1, 0.5), ys);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.step() == 3);
        CHECK(std::string(e.what()).find("S_3") != std::string::npos);
    }
}

TEST_CASE("invalid inputs are rejected") {
    ModelParams p = scalar_model(2);
    p.Q(0, 0) = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = scalar_model(2);
    CHECK_THROWS_AS(kalman_filter(p, Matrix::Zero(2, 2), Observations(2, Vector::Zero(1))), std::invalid_argument);
    CHECK_THROWS_AS(kalman_filter(p, Matrix::Zero(1, 1), Observations(2, Vector::Zero(3))), std::invalid_argument);
}

}  // TEST_SUITE
