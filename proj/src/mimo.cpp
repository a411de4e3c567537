#include "graphem/mimo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace graphem::mimo {

namespace {

int qam_side(int order) {
    const int m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
    if (order < 4 || m * m != order || !std::has_single_bit(static_cast<unsigned>(m))) {
        throw std::invalid_argument("QAM order must be a square power of two (4, 16, 64, ...), got " +
                                    std::to_string(order));
    }
    return m;
}

unsigned gray(unsigned i) { return i ^ (i >> 1); }

double qam_scale(int m) { return std::sqrt(2.0 * (m * m - 1) / 3.0); }

// Level index in 0..m-1 nearest to the normalized coordinate u.
int slice(double u, int m) {
    const int i = static_cast<int>(std::lround((u + (m - 1)) / 2.0));
    return std::clamp(i, 0, m - 1);
}

}  // namespace

int MimoConfig::bits_per_symbol() const {
    const int m = qam_side(qam_order);
    return 2 * std::countr_zero(static_cast<unsigned>(m));
}

double MimoConfig::noise_variance() const {
    return 1.0 / (bits_per_symbol() * std::pow(10.0, ebn0_db / 10.0));
}

void MimoConfig::validate() const {
    if (L < 1) throw std::invalid_argument("L must be positive");
    if (n_pilots < 1) throw std::invalid_argument("n_pilots must be positive");
    qam_side(qam_order);
    if (!(sigma_q > 0.0) || !(sigma_r > 0.0)) throw std::invalid_argument("sigma_q and sigma_r must be positive");
    if (K_train < 1 || K_test < 1) throw std::invalid_argument("K_train and K_test must be positive");
    if (symbols_per_step < 1) throw std::invalid_argument("symbols_per_step must be positive");
}

Matrix build_observation_matrix(const std::vector<CVector>& pilots) {
    if (pilots.empty()) throw std::invalid_argument("at least one pilot is required");
    const int L = static_cast<int>(pilots.front().size());
    const int L2 = L * L;
    Matrix H = Matrix::Zero(2 * L * static_cast<int>(pilots.size()), 2 * L2);
    for (size_t i = 0; i < pilots.size(); ++i) {
        const CVector& p = pilots[i];
        if (p.size() != L) throw std::invalid_argument("pilots must share the same length");
        if (!p.allFinite()) throw std::invalid_argument("pilot entries must be finite");
        const int re = 2 * L * static_cast<int>(i);
        const int im = re + L;
        for (int r = 0; r < L; ++r) {
            for (int c = 0; c < L; ++c) {
                const int idx = c * L + r;
                const double pr = p(c).real(), pi = p(c).imag();
                // Re z_r += c_r p_r - c_i p_i,  Im z_r += c_r p_i + c_i p_r
                H(re + r, idx) += pr;
                H(re + r, L2 + idx) -= pi;
                H(im + r, idx) += pi;
                H(im + r, L2 + idx) += pr;
            }
        }
    }
    return H;
}

std::vector<Complex> qam_constellation(int order) {
    const int m = qam_side(order);
    const int bits = std::countr_zero(static_cast<unsigned>(m));
    const double s = qam_scale(m);
    std::vector<Complex> pts(order);
    for (int i = 0; i < m; ++i) {
        for (int q = 0; q < m; ++q) {
            const unsigned label = (gray(i) << bits) | gray(q);
            pts[label] = Complex(2.0 * i - (m - 1), 2.0 * q - (m - 1)) / s;
        }
    }
    return pts;
}

unsigned qam_detect(Complex z, int order) {
    const int m = qam_side(order);
    const int bits = std::countr_zero(static_cast<unsigned>(m));
    const double s = qam_scale(m);
    const int i = slice(z.real() * s, m);
    const int q = slice(z.imag() * s, m);
    return (gray(i) << bits) | gray(q);
}

int bit_errors(unsigned a, unsigned b) { return std::popcount(a ^ b); }

BlockMap channel_block_map(int L) {
    if (L < 1) throw std::invalid_argument("L must be positive");
    const int L2 = L * L;
    BlockMap map;
    map.blocks.reserve(static_cast<size_t>(L2) * L2);
    for (int j = 0; j < L2; ++j) {
        for (int i = 0; i < L2; ++i) {
            map.blocks.push_back({{i, j}, {i + L2, j}, {i, j + L2}, {i + L2, j + L2}});
        }
    }
    return map;
}

Vector embed_channel(const CMatrix& C) {
    const auto n = C.size();
    Vector x(2 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        x(k) = C(k).real();  // column-major linear index
        x(n + k) = C(k).imag();
    }
    return x;
}

CMatrix channel_from_state(const Vector& x, int L) {
    const int n = L * L;
    if (x.size() != 2 * n) throw std::invalid_argument("state has wrong dimension for L");
    CMatrix C(L, L);
    for (int k = 0; k < n; ++k) C(k) = Complex(x(k), x(n + k));
    return C;
}

ModelParams channel_model(const MimoConfig& cfg, int K, std::mt19937_64& rng) {
    cfg.validate();
    const auto constellation = qam_constellation(cfg.qam_order);
    std::uniform_int_distribution<int> pick(0, cfg.qam_order - 1);
    const int nx = cfg.state_dim();
    const int ny = cfg.obs_dim();

    ModelParams p;
    p.K = K;
    p.Q = cfg.sigma_q * cfg.sigma_q * Matrix::Identity(nx, nx);
    p.R = {cfg.sigma_r * cfg.sigma_r * Matrix::Identity(ny, ny)};
    p.x0_mean = Vector::Zero(nx);
    p.P0 = Matrix::Identity(nx, nx);
    p.H.reserve(K);
    std::vector<CVector> pilots(cfg.n_pilots, CVector(cfg.L));
    for (int k = 0; k < K; ++k) {
        for (auto& pv : pilots)
            for (int a = 0; a < cfg.L; ++a) pv(a) = constellation[pick(rng)];
        p.H.push_back(build_observation_matrix(pilots));
    }
    return p;
}

double track_and_ber(const Matrix& A_hat, const Matrix& A_true, const MimoConfig& cfg,
                     std::uint64_t seed) {
    cfg.validate();
    const int nx = cfg.state_dim();
    if (A_hat.rows() != nx || A_hat.cols() != nx || A_true.rows() != nx || A_true.cols() != nx) {
        throw std::invalid_argument("transition matrices must be 2L^2 x 2L^2");
    }
    std::mt19937_64 rng(seed);
    const ModelParams params = channel_model(cfg, cfg.K_test, rng);
    const Trajectory traj = simulate(params, A_true, rng());
    const FilterOutput filt = kalman_filter(params, A_hat, traj.observations);

    const auto constellation = qam_constellation(cfg.qam_order);
    const int bits = cfg.bits_per_symbol();
    const double n0 = cfg.noise_variance();
    std::uniform_int_distribution<int> pick(0, cfg.qam_order - 1);
    std::normal_distribution<double> noise(0.0, std::sqrt(n0 / 2.0));
    const int L = cfg.L;

    long long errors = 0;
    long long total = 0;
    std::vector<unsigned> sent(L);
    CVector s(L), y(L);
    for (int k = 1; k <= cfg.K_test; ++k) {
        const CMatrix C = channel_from_state(traj.states[k], L);
        const CMatrix C_hat = channel_from_state(filt.m[k], L);
        // MMSE equalizer C^H (C C^H + N0 I)^{-1}
        CMatrix G = C_hat * C_hat.adjoint();
        G.diagonal().array() += n0;
        Eigen::LLT<CMatrix> chol(G);
        if (chol.info() != Eigen::Success) {
            G.diagonal().array() += 1e-10 * std::max(1.0, G.trace().real() / L);
            chol.compute(G);
            if (chol.info() != Eigen::Success) {
                throw NumericalError("MMSE equalizer is singular", k);
            }
        }
        const CMatrix W = chol.solve(C_hat).adjoint();
        for (int t = 0; t < cfg.symbols_per_step; ++t) {
            for (int a = 0; a < L; ++a) {
                sent[a] = static_cast<unsigned>(pick(rng));
                s(a) = constellation[sent[a]];
            }
            y = C * s;
            for (int a = 0; a < L; ++a) y(a) += Complex(noise(rng), noise(rng));
            const CVector s_hat = W * y;
            for (int a = 0; a < L; ++a) {
                errors += bit_errors(sent[a], qam_detect(s_hat(a), cfg.qam_order));
            }
            total += static_cast<long long>(L) * bits;
        }
    }
    return static_cast<double>(errors) / static_cast<double>(total);
}

}  // namespace graphem::mimo
