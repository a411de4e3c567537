#pragma once

// Reference computations used by the tests. None of these call into the
// filter, smoother, prox or solver code they are compared against.

#include "graphem/estep.hpp"
#include "graphem/regularizer.hpp"
#include "graphem/ssm.hpp"

#include <functional>
#include <random>
#include <vector>

namespace oracle {

using graphem::Matrix;
using graphem::ModelParams;
using graphem::Observations;
using graphem::Vector;

Matrix random_matrix(int r, int c, std::mt19937_64& rng, double scale = 1.0);
Matrix random_spd(int n, std::mt19937_64& rng, double floor = 0.2);
/// Random matrix rescaled to spectral norm `norm`.
Matrix random_stable(int n, std::mt19937_64& rng, double norm = 0.8);

/// Random model with general SPD covariances, constant H and R.
ModelParams random_model(int nx, int ny, int K, std::mt19937_64& rng);

/// Stacked Gaussian of z = (x_0, ..., x_K, y_1, ..., y_K) built from the
/// generative equations.
struct JointGaussian {
    int nx = 0, ny = 0, K = 0;
    Vector mean;
    Matrix cov;

    int x_index(int k) const { return k * nx; }
    int y_index(int k) const { return (K + 1) * nx + (k - 1) * ny; }
};

JointGaussian joint_gaussian(const ModelParams& params, const Matrix& A);

struct Moments {
    Vector mean;
    Matrix cov;
};

/// Moments of x_0..x_K (stacked) given y_1..y_upto.
Moments condition_states(const JointGaussian& g, const Observations& ys, int upto);

/// -log N(y_1:K; stacked mean, stacked covariance).
double dense_nll(const JointGaussian& g, const Observations& ys);

/// Exact (Psi, Delta, Phi) from the stacked smoothing posterior.
graphem::EStepStats exact_stats(const Moments& post, int nx, int K);

struct McStats {
    graphem::EStepStats mean;
    Matrix se_psi, se_delta, se_phi;  // standard errors
};

/// Monte Carlo estimates of the statistics from n samples of the posterior.
McStats monte_carlo_stats(const Moments& post, int nx, int K, long n, std::uint64_t seed);

/// Scalar objective over 2x2 matrices.
using Objective = std::function<double(const Matrix&)>;

/// Coarse-to-fine grid minimization over [-span, span]^4 down to `resolution`.
/// `feasible` (optional) restricts the search.
Matrix grid_minimize_2x2(const Objective& f, double span, double resolution,
                         const std::function<bool(const Matrix&)>& feasible = {});

/// Per-entry 1-D grid minimization over [-span, span] with step `resolution`,
/// other entries held at `at`.
Matrix coordinate_grid_2x2(const Objective& f, const Matrix& at, double span, double resolution);

/// prox of t*kappa*||.||_1 + indicator{||.||_2 <= delta} by proximal Dykstra.
Matrix prox_l1_spectral(const Matrix& V, double t_kappa, double delta);

struct ReferenceSolution {
    Matrix A;
    double objective = 0.0;
    int iterations = 0;
};

/// Accelerated proximal gradient for
///   min -q(A) + kappa ||A||_1   s.t. ||A||_2 <= delta.
ReferenceSolution proximal_gradient_reference(const graphem::EStepStats& stats, const Matrix& Q,
                                              double kappa, double delta, int max_iters = 100000);

/// Surrogate instance built from a simulated sparse 3-state model.
struct SurrogateInstance {
    graphem::EStepStats stats;
    Matrix Q;
    Matrix A_init;
    double kappa = 0.0;
    double delta = 0.99;
};

/// Instance `index` of a fixed family: alternating radii 0.99 / 0.6 and
/// kappa between 5% and 30% of max |Q^-1 Delta|.
SurrogateInstance surrogate_instance(int index, int nx = 3);

/// -q(A) + kappa ||A||_1 written out directly.
double reference_objective(const Matrix& A, const graphem::EStepStats& stats, const Matrix& Q,
                           double kappa);

}  // namespace oracle
