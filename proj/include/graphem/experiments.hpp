#pragma once

// Synthetic ground truths, data generation and the benchmark runner.

#include "graphem/baselines.hpp"
#include "graphem/graphem.hpp"
#include "graphem/metrics.hpp"
#include "graphem/mimo.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace graphem {

/// Block ensemble: entries U(-1, 1) plus kBlockDiagonalBoost on the diagonal,
/// projected onto the spectral ball of radius delta.
inline constexpr double kBlockDiagonalBoost = 2.0;
inline constexpr const char* kBlockEnsemble =
    "block = U(-1,1) entries + 2 I, projected onto the spectral ball of radius delta";

struct DatasetSpec {
    std::string name = "custom";  // A..F or custom
    std::vector<int> blocks;      // A-D, custom; F uses the 16x16 half-block
    double sigma_q = 0.1;         // standard deviations: Q = sigma_q^2 I, ...
    double sigma_r = 0.1;
    double sigma_p = 1e-4;
    int K = 1000;
    std::uint64_t seed = 0;
    double delta = 0.99;

    /// Presets for A..F; throws on an unknown name.
    static DatasetSpec preset(const std::string& name);
    bool is_channel() const { return name == "E" || name == "F"; }
    int state_dim() const;
    void validate() const;
};

struct Dataset {
    DatasetSpec spec;
    ModelParams params;
    Matrix A_true;
    Trajectory trajectory;
};

/// Random stable b x b block from the ensemble above.
Matrix random_ar1_block(int b, double delta, std::mt19937_64& rng);

/// Block-diagonal matrix of random_ar1_block blocks.
Matrix block_diagonal_truth(const std::vector<int>& blocks, double delta, std::mt19937_64& rng);

/// Dataset E ground truth: a at i = j and |i - j| = 16 (32 x 32).
Matrix dataset_e_truth(double a = 0.495);

/// Ground truth for a spec, deterministic in spec.seed.
Matrix make_truth(const DatasetSpec& spec);

/// Ground truth, model parameters and a simulated trajectory. Channel
/// datasets (E, F) use pilot-driven time-varying observation matrices.
Dataset make_dataset(const DatasetSpec& spec);

inline constexpr const char* kPgc = "pgc";
inline constexpr const char* kCgc = "cgc";

struct BenchmarkConfig {
    std::vector<DatasetSpec> specs;
    std::vector<std::string> methods;     // graphem, stableem, mlem, oracleem, pgc, cgc
    int n_realizations = 10;
    std::uint64_t base_seed = 1;          // realization r uses base_seed + r
    std::map<std::string, double> kappa;  // per dataset name; falls back to default_kappa
    double default_kappa = 300.0;
    FitConfig fit;                        // template (method and kappa are overwritten)
    GrangerConfig granger;
    int jobs = 1;
    std::filesystem::path out_dir;        // empty: no files written

    void validate() const;
};

struct RealizationResult {
    std::string dataset;
    std::string method;
    int realization = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double rmse = 0.0;  // NaN for Granger methods
    DetectionScores scores;
    double seconds = 0.0;
    int em_iters = 0;
};

struct BenchmarkRow {
    std::string dataset;
    std::string method;
    int n_ok = 0;
    int n_failed = 0;
    double rmse = 0.0;  // NaN for Granger methods
    DetectionScores scores;
    double seconds = 0.0;
};

struct BenchmarkResult {
    std::vector<BenchmarkRow> rows;                // spec-major, method order as given
    std::vector<RealizationResult> realizations;   // same order, realization index inner
};

/// Runs every (spec, method, realization). When out_dir is set, writes
///   results.csv       per-row means of RMSE and detection scores, no timing (deterministic bytes)
///   timing.csv        mean wall time per row
///   realizations.csv  one line per run
///   runs/<dataset>_r<k>/  A_true.csv and, per EM method, A_hat and loss trace
///   metadata.txt      seeds, configuration echo, ensemble, version
BenchmarkResult run_benchmark(const BenchmarkConfig& cfg);

struct ChannelStudyConfig {
    DatasetSpec spec = DatasetSpec::preset("E");  // E or F; K is the training length
    mimo::MimoConfig mimo;                        // kappas, K_test, symbols_per_step
    FitConfig fit;                                // template for both methods
    std::uint64_t test_seed = 1000;
    int jobs = 1;
};

struct ChannelPoint {
    double kappa = 0.0;
    double rmse = 0.0;
    double ber = 0.0;
    int em_iters = 0;
};

struct ChannelStudyResult {
    Matrix A_true;
    Matrix A_mlem;
    double rmse_mlem = 0.0;
    double ber_mlem = 0.0;
    std::vector<ChannelPoint> graphem;  // one per kappa, input order
};

/// Trains MLEM and GraphEM (block l21 over channel_block_map) on one
/// realization of the spec, then measures the tracking BER of every estimate
/// on the same test sequence.
ChannelStudyResult run_channel_study(const ChannelStudyConfig& cfg);

}  // namespace graphem
