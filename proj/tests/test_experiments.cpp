#include "oracles.hpp"

#include "graphem/experiments.hpp"
#include "graphem/io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace graphem;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("graphem_test_" + name);
    fs::remove_all(p);
    return p;
}

bool block_diagonal(const Matrix& A, const std::vector<int>& blocks) {
    int off = 0;
    std::vector<int> owner(A.rows());
    for (size_t b = 0; b < blocks.size(); ++b) {
        for (int i = 0; i < blocks[b]; ++i) owner[off + i] = static_cast<int>(b);
        off += blocks[b];
    }
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j)
            if (owner[i] != owner[j] && A(i, j) != 0.0) return false;
    return true;
}

BenchmarkConfig small_benchmark() {
    BenchmarkConfig cfg;
    cfg.specs = {DatasetSpec::preset("A")};
    cfg.specs[0].K = 200;
    cfg.methods = {"mlem", "graphem", "pgc"};
    cfg.n_realizations = 2;
    return cfg;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("dataset presets") {
    const DatasetSpec a = DatasetSpec::preset("A");
    CHECK(a.blocks == std::vector<int>{3, 3, 3});
    CHECK(a.sigma_q == 0.1);
    CHECK(a.sigma_r == 0.1);
    CHECK(a.sigma_p == 1e-4);
    CHECK(a.K == 1000);
    CHECK(a.state_dim() == 9);
    const DatasetSpec b = DatasetSpec::preset("B");
    CHECK(b.sigma_q == 1.0);
    CHECK(b.sigma_r == 1.0);
    CHECK(DatasetSpec::preset("C").blocks == std::vector<int>{3, 5, 5, 3});
    CHECK(DatasetSpec::preset("D").sigma_q == 1.0);
    const DatasetSpec e = DatasetSpec::preset("E");
    CHECK(e.is_channel());
    CHECK(e.state_dim() == 32);
    CHECK(e.K == 200);
    CHECK(DatasetSpec::preset("F").blocks == std::vector<int>{4, 8, 4});
    CHECK_THROWS_AS(DatasetSpec::preset("G"), std::invalid_argument);
}

TEST_CASE("block truths are stable, block diagonal and deterministic") {
    for (const char* name : {"A", "C"}) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            DatasetSpec s = DatasetSpec::preset(name);
            s.seed = seed;
            const Matrix A = make_truth(s);
            CHECK(spectral_norm(A) <= 0.99 + 1e-12);
            CHECK(block_diagonal(A, s.blocks));
            CHECK(A == make_truth(s));
            // diagonal blocks are dense
            CHECK((A.diagonal().array() != 0.0).all());
        }
    }
    DatasetSpec s = DatasetSpec::preset("A");
    s.seed = 1;
    DatasetSpec t = s;
    t.seed = 2;
    CHECK(make_truth(s) != make_truth(t));
}

TEST_CASE("dataset E truth") {
    const Matrix A = dataset_e_truth();
    CHECK((A.array() != 0.0).count() == 64);
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) {
            const bool on = i == j || std::abs(i - j) == 16;
            CHECK(A(i, j) == (on ? 0.495 : 0.0));
        }
    CHECK(spectral_norm(A) <= 0.99 + 1e-12);
}

TEST_CASE("dataset F truth repeats one block-diagonal block") {
    DatasetSpec s = DatasetSpec::preset("F");
    s.seed = 4;
    const Matrix A = make_truth(s);
    REQUIRE(A.rows() == 32);
    const Matrix B = A.topLeftCorner(16, 16);
    CHECK(A.topRightCorner(16, 16) == B);
    CHECK(A.bottomLeftCorner(16, 16) == B);
    CHECK(A.bottomRightCorner(16, 16) == B);
    CHECK(block_diagonal(B, s.blocks));
    CHECK(spectral_norm(A) <= 0.99 + 1e-12);
}

TEST_CASE("generated data has the requested shape") {
    DatasetSpec s = DatasetSpec::preset("C");
    s.K = 50;
    s.seed = 3;
    const Dataset d = make_dataset(s);
    CHECK(d.trajectory.states.size() == 51);
    CHECK(d.trajectory.observations.size() == 50);
    CHECK(d.params.Q.isApprox(0.01 * Matrix::Identity(16, 16)));
    CHECK(d.params.P0.isApprox(1e-8 * Matrix::Identity(16, 16)));
    CHECK(d.A_true == make_truth(s));

    DatasetSpec e = DatasetSpec::preset("E");
    e.K = 10;
    const Dataset c = make_dataset(e);
    CHECK(c.params.H.size() == 10);
    CHECK(c.params.H[0].rows() == 32);
    CHECK(c.params.P0.isApprox(Matrix::Identity(32, 32)));
}

TEST_CASE("noise scale does not change the block estimates") {
    // A and B differ by a common noise scale except for the fixed prior
    // spread, so the estimates agree closely but not exactly
    DatasetSpec a = DatasetSpec::preset("A"), b = DatasetSpec::preset("B");
    a.seed = b.seed = 5;
    a.K = b.K = 200;
    const Dataset da = make_dataset(a), db = make_dataset(b);
    CHECK(da.A_true == db.A_true);
    FitConfig f;
    f.method = Method::MLEM;
    f.init_seed = 5;
    const Matrix ea = fit(da.params, da.trajectory.observations, f).A_hat;
    const Matrix eb = fit(db.params, db.trajectory.observations, f).A_hat;
    CHECK((ea - eb).norm() < 1e-3);
}

TEST_CASE("spec validation") {
    DatasetSpec s = DatasetSpec::preset("A");
    s.sigma_q = -1.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = DatasetSpec::preset("A");
    s.delta = 1.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = DatasetSpec::preset("F");
    s.blocks = {4, 4};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = DatasetSpec{};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("benchmark rows average the realizations") {
    BenchmarkConfig cfg = small_benchmark();
    const BenchmarkResult res = run_benchmark(cfg);
    REQUIRE(res.rows.size() == 3);
    REQUIRE(res.realizations.size() == 6);
    for (size_t m = 0; m < 3; ++m) {
        const BenchmarkRow& row = res.rows[m];
        CHECK(row.method == cfg.methods[m]);
        CHECK(row.n_ok == 2);
        const auto& r0 = res.realizations[2 * m];
        const auto& r1 = res.realizations[2 * m + 1];
        CHECK(r0.seed == 1);
        CHECK(r1.seed == 2);
        CHECK(row.scores.f1 == doctest::Approx((r0.scores.f1 + r1.scores.f1) / 2));
        CHECK(row.scores.recall == doctest::Approx((r0.scores.recall + r1.scores.recall) / 2));
        if (row.method == "pgc") {
            CHECK(std::isnan(row.rmse));
        } else {
            CHECK(row.rmse == doctest::Approx((r0.rmse + r1.rmse) / 2));
        }
    }
}

TEST_CASE("benchmark output is byte-identical across runs and job counts") {
    BenchmarkConfig cfg = small_benchmark();
    cfg.out_dir = scratch_dir("bench1");
    run_benchmark(cfg);
    BenchmarkConfig again = cfg;
    again.out_dir = scratch_dir("bench2");
    again.jobs = 2;
    run_benchmark(again);
    for (const char* f : {"results.csv", "realizations.csv"}) {
        CAPTURE(f);
        const std::string a = slurp(cfg.out_dir / f);
        CHECK_FALSE(a.empty());
        if (std::string(f) == "results.csv") CHECK(a == slurp(again.out_dir / f));
    }
    CHECK(fs::exists(cfg.out_dir / "timing.csv"));
    CHECK(fs::exists(cfg.out_dir / "metadata.txt"));
    CHECK(fs::exists(cfg.out_dir / "runs" / "A_r0" / "A_true.csv"));
    CHECK(fs::exists(cfg.out_dir / "runs" / "A_r1" / "graphem_loss.csv"));
    CHECK(slurp(cfg.out_dir / "runs" / "A_r1" / "graphem_A_hat.csv") ==
          slurp(again.out_dir / "runs" / "A_r1" / "graphem_A_hat.csv"));
    fs::remove_all(cfg.out_dir);
    fs::remove_all(again.out_dir);
}

TEST_CASE("failed runs are counted and excluded") {
    BenchmarkConfig cfg = small_benchmark();
    cfg.methods = {"graphem", "pgc"};
    cfg.fit.ms.lambda = 0.9;  // invalid for three prox terms
    const BenchmarkResult res = run_benchmark(cfg);
    CHECK(res.rows[0].n_failed == 2);
    CHECK(res.rows[0].n_ok == 0);
    CHECK(std::isnan(res.rows[0].rmse));
    CHECK_FALSE(res.realizations[0].error.empty());
    CHECK(res.rows[1].n_ok == 2);
}

TEST_CASE("benchmark configuration is validated") {
    BenchmarkConfig cfg = small_benchmark();
    cfg.methods = {"lasso"};
    CHECK_THROWS_AS(run_benchmark(cfg), std::invalid_argument);
    cfg = small_benchmark();
    cfg.n_realizations = 0;
    CHECK_THROWS_AS(run_benchmark(cfg), std::invalid_argument);
}

TEST_CASE("channel study produces one point per kappa") {
    ChannelStudyConfig cfg;
    cfg.spec.K = 60;
    cfg.spec.seed = 1;
    cfg.mimo.K_test = 20;
    cfg.mimo.symbols_per_step = 10;
    cfg.mimo.kappas = {50.0, 200.0};
    cfg.fit.max_em_iters = 5;
    const ChannelStudyResult r = run_channel_study(cfg);
    REQUIRE(r.graphem.size() == 2);
    CHECK(r.graphem[0].kappa == 50.0);
    CHECK(r.A_true == dataset_e_truth());
    CHECK(r.A_mlem.rows() == 32);
    for (const auto& p : r.graphem) {
        CHECK(p.ber >= 0.0);
        CHECK(p.ber <= 1.0);
        CHECK(std::isfinite(p.rmse));
    }
}

}  // TEST_SUITE
