#pragma once

// MIMO fading-channel tracking. The L x L complex channel C_k is embedded as
// the real state x = [Re(vec C); Im(vec C)] (column-major vec), and each pilot
// p contributes the real observation [Re(C p); Im(C p)].

#include "graphem/regularizer.hpp"
#include "graphem/ssm.hpp"

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace graphem::mimo {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

struct MimoConfig {
    int L = 4;
    int n_pilots = 4;
    int qam_order = 64;
    double ebn0_db = 38.0;
    double sigma_q = 0.2;
    double sigma_r = 0.2;
    int K_train = 200;
    int K_test = 10000;
    int symbols_per_step = 500;
    std::vector<double> kappas = {50.0, 100.0, 200.0};
    std::uint64_t seed = 0;

    int state_dim() const { return 2 * L * L; }
    int obs_dim() const { return 2 * L * n_pilots; }
    int bits_per_symbol() const;
    /// Complex noise variance E|n|^2 per receive antenna for unit-energy
    /// symbols: N0 = 1 / (bits_per_symbol * 10^(EbN0/10)).
    double noise_variance() const;
    void validate() const;
};

/// Real observation matrix (2 L n_pilots) x (2 L^2) for the given pilots.
Matrix build_observation_matrix(const std::vector<CVector>& pilots);

/// Square QAM constellation with unit average energy. Entry b is the point
/// carrying Gray label b. Throws unless order is 4, 16, 64, ...
std::vector<Complex> qam_constellation(int order);

/// Gray label of the constellation point nearest to z.
unsigned qam_detect(Complex z, int order);

int bit_errors(unsigned a, unsigned b);

/// L^4 blocks of 4 entries pairing the real/imaginary couplings of each
/// (channel entry, channel entry) pair.
BlockMap channel_block_map(int L);

/// x = [Re(vec C); Im(vec C)] and its inverse.
Vector embed_channel(const CMatrix& C);
CMatrix channel_from_state(const Vector& x, int L);

/// Pilot-driven LG-SSM: per-step observation matrices from uniform QAM pilots,
/// Q = sigma_q^2 I, R = sigma_r^2 I, x0 ~ N(0, I).
ModelParams channel_model(const MimoConfig& cfg, int K, std::mt19937_64& rng);

/// Tracks the true channel (evolving under A_true) with a Kalman filter that
/// uses A_hat, detects symbols_per_step QAM vectors per step with the MMSE
/// equalizer and returns the bit error rate over the K_test steps.
double track_and_ber(const Matrix& A_hat, const Matrix& A_true, const MimoConfig& cfg,
                     std::uint64_t seed);

}  // namespace graphem::mimo
