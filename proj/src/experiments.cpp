#include "graphem/experiments.hpp"

#include "graphem/io.hpp"
#include "graphem/log.hpp"
#include "graphem/prox.hpp"
#include "graphem/version.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace graphem {

DatasetSpec DatasetSpec::preset(const std::string& name) {
    DatasetSpec s;
    s.name = name;
    if (name == "A" || name == "B") {
        s.blocks = {3, 3, 3};
    } else if (name == "C" || name == "D") {
        s.blocks = {3, 5, 5, 3};
    } else if (name == "E" || name == "F") {
        if (name == "F") s.blocks = {4, 8, 4};
        s.sigma_q = 0.2;
        s.sigma_r = 0.2;
        s.sigma_p = 1.0;
        s.K = 200;
        return s;
    } else {
        throw std::invalid_argument("unknown dataset '" + name + "' (expected A-F)");
    }
    if (name == "B" || name == "D") {
        s.sigma_q = 1.0;
        s.sigma_r = 1.0;
    }
    return s;
}

int DatasetSpec::state_dim() const {
    if (is_channel()) return 32;
    return std::accumulate(blocks.begin(), blocks.end(), 0);
}

void DatasetSpec::validate() const {
    if (!(sigma_q > 0.0 && sigma_r > 0.0 && sigma_p > 0.0)) {
        throw std::invalid_argument("dataset " + name + ": sigmas must be positive");
    }
    if (K < 1) throw std::invalid_argument("dataset " + name + ": K must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("dataset " + name + ": delta must lie in (0, 1)");
    if (name == "E") return;
    if (blocks.empty()) throw std::invalid_argument("dataset " + name + ": block list is empty");
    for (int b : blocks)
        if (b < 1) throw std::invalid_argument("dataset " + name + ": block sizes must be positive");
    if (name == "F" && std::accumulate(blocks.begin(), blocks.end(), 0) != 16) {
        throw std::invalid_argument("dataset F: blocks must sum to 16");
    }
}

Matrix random_ar1_block(int b, double delta, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Matrix B(b, b);
    for (int j = 0; j < b; ++j)
        for (int i = 0; i < b; ++i) B(i, j) = unif(rng);
    B.diagonal().array() += kBlockDiagonalBoost;
    return project_constraint(PenaltyTerm::spectral_ball(delta), B);
}

Matrix block_diagonal_truth(const std::vector<int>& blocks, double delta, std::mt19937_64& rng) {
    const int n = std::accumulate(blocks.begin(), blocks.end(), 0);
    Matrix A = Matrix::Zero(n, n);
    int off = 0;
    for (int b : blocks) {
        A.block(off, off, b, b) = random_ar1_block(b, delta, rng);
        off += b;
    }
    return A;
}

Matrix dataset_e_truth(double a) {
    Matrix A = Matrix::Zero(32, 32);
    for (int i = 0; i < 32; ++i) {
        A(i, i) = a;
        if (i + 16 < 32) {
            A(i + 16, i) = a;
            A(i, i + 16) = a;
        }
    }
    return A;
}

namespace {

Matrix truth_from(const DatasetSpec& spec, std::mt19937_64& rng) {
    if (spec.name == "E") return dataset_e_truth();
    if (spec.name == "F") {
        // [[B, B], [B, B]] has spectral norm 2 ||B||
        const Matrix B = block_diagonal_truth(spec.blocks, spec.delta / 2.0, rng);
        Matrix A(32, 32);
        A << B, B, B, B;
        return A;
    }
    return block_diagonal_truth(spec.blocks, spec.delta, rng);
}

}  // namespace

Matrix make_truth(const DatasetSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    return truth_from(spec, rng);
}

Dataset make_dataset(const DatasetSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    Dataset d;
    d.spec = spec;
    d.A_true = truth_from(spec, rng);
    const int nx = static_cast<int>(d.A_true.rows());
    if (spec.is_channel()) {
        mimo::MimoConfig mc;
        mc.sigma_q = spec.sigma_q;
        mc.sigma_r = spec.sigma_r;
        d.params = mimo::channel_model(mc, spec.K, rng);
        d.params.P0 = spec.sigma_p * spec.sigma_p * Matrix::Identity(nx, nx);
    } else {
        d.params = ModelParams::isotropic(nx, Matrix::Identity(nx, nx), spec.sigma_q, spec.sigma_r,
                                          spec.sigma_p, spec.K);
    }
    d.trajectory = simulate(d.params, d.A_true, rng());
    return d;
}

void BenchmarkConfig::validate() const {
    if (specs.empty()) throw std::invalid_argument("benchmark: no datasets");
    if (methods.empty()) throw std::invalid_argument("benchmark: no methods");
    if (n_realizations < 1) throw std::invalid_argument("benchmark: n_realizations must be positive");
    if (jobs < 1) throw std::invalid_argument("benchmark: jobs must be positive");
    for (const auto& m : methods) {
        if (m == kPgc || m == kCgc) continue;
        method_from_string(m);
    }
    for (const auto& s : specs) s.validate();
    granger.validate();
}

namespace {

bool is_granger(const std::string& m) { return m == kPgc || m == kCgc; }

RealizationResult run_one(const BenchmarkConfig& cfg, const Dataset& data, const std::string& method,
                          int r, const std::filesystem::path& run_dir) {
    RealizationResult out;
    out.dataset = data.spec.name;
    out.method = method;
    out.realization = r;
    out.seed = data.spec.seed;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (is_granger(method)) {
            GrangerConfig g = cfg.granger;
            g.mode = granger_mode_from_string(method);
            const BoolMatrix adj = granger_graph(data.trajectory.observations, g);
            out.rmse = std::numeric_limits<double>::quiet_NaN();
            out.scores = detection(adj.cast<double>().matrix(), data.A_true);
            if (!run_dir.empty()) io::write_bool_matrix(run_dir / (method + "_adjacency.csv"), adj);
        } else {
            FitConfig f = cfg.fit;
            f.method = method_from_string(method);
            auto it = cfg.kappa.find(data.spec.name);
            f.kappa = it != cfg.kappa.end() ? it->second : cfg.default_kappa;
            f.init_seed = data.spec.seed;
            f.A_true = data.A_true;
            if (f.method == Method::OracleEM) {
                f.support_mask = BoolMatrix(data.A_true.array().abs() > kEdgeThreshold);
            }
            if (data.spec.is_channel() && f.method == Method::GraphEM) {
                f.penalty = SparsityPenalty::BlockL21;
                f.blocks = mimo::channel_block_map(4);
            }
            const FitResult res = fit(data.params, data.trajectory.observations, f);
            out.rmse = rmse(res.A_hat, data.A_true);
            out.scores = detection(res.A_hat, data.A_true);
            out.em_iters = res.em_iters;
            if (!run_dir.empty()) {
                io::write_matrix(run_dir / (method + "_A_hat.csv"), res.A_hat);
                std::vector<double> iters(res.loss_trace.size());
                std::iota(iters.begin(), iters.end(), 0.0);
                io::write_columns(run_dir / (method + "_loss.csv"), {"iteration", "loss", "rmse"},
                                  {iters, res.loss_trace, res.rmse_trace});
            }
        }
        out.ok = true;
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
        log::warn("benchmark ", data.spec.name, " r", r, " ", method, " failed: ", e.what());
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::string fmt(double v) { return std::isnan(v) ? "-" : io::format_double(v); }

void write_outputs(const BenchmarkConfig& cfg, const BenchmarkResult& res) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    {
        std::ofstream os(cfg.out_dir / "results.csv", std::ios::binary);
        os << "dataset,method,n_ok,n_failed,rmse,accuracy,precision,recall,specificity,f1\n";
        for (const auto& r : res.rows) {
            os << r.dataset << ',' << r.method << ',' << r.n_ok << ',' << r.n_failed << ','
               << fmt(r.rmse) << ',' << fmt(r.scores.accuracy) << ',' << fmt(r.scores.precision)
               << ',' << fmt(r.scores.recall) << ',' << fmt(r.scores.specificity) << ','
               << fmt(r.scores.f1) << '\n';
        }
    }
    {
        std::ofstream os(cfg.out_dir / "timing.csv", std::ios::binary);
        os << "dataset,method,time_s\n";
        for (const auto& r : res.rows) os << r.dataset << ',' << r.method << ',' << fmt(r.seconds) << '\n';
    }
    {
        std::ofstream os(cfg.out_dir / "realizations.csv", std::ios::binary);
        os << "dataset,method,realization,seed,ok,rmse,accuracy,precision,recall,specificity,f1,em_iters\n";
        for (const auto& r : res.realizations) {
            os << r.dataset << ',' << r.method << ',' << r.realization << ',' << r.seed << ','
               << (r.ok ? 1 : 0) << ',' << fmt(r.rmse) << ',' << fmt(r.scores.accuracy) << ','
               << fmt(r.scores.precision) << ',' << fmt(r.scores.recall) << ','
               << fmt(r.scores.specificity) << ',' << fmt(r.scores.f1) << ',' << r.em_iters << '\n';
        }
    }
    {
        std::ofstream os(cfg.out_dir / "metadata.txt", std::ios::binary);
        os << "tool=graphem " << kVersion << '\n';
        os << "ensemble=" << kBlockEnsemble << '\n';
        os << "n_realizations=" << cfg.n_realizations << '\n';
        os << "base_seed=" << cfg.base_seed << '\n';
        os << "seeds=base_seed+realization\n";
        os << "methods=";
        for (size_t i = 0; i < cfg.methods.size(); ++i) os << (i ? "," : "") << cfg.methods[i];
        os << '\n';
        for (const auto& s : cfg.specs) {
            os << "dataset." << s.name << ".blocks=";
            for (size_t i = 0; i < s.blocks.size(); ++i) os << (i ? "," : "") << s.blocks[i];
            os << '\n';
            os << "dataset." << s.name << ".sigmas=" << fmt(s.sigma_q) << ',' << fmt(s.sigma_r) << ','
               << fmt(s.sigma_p) << '\n';
            os << "dataset." << s.name << ".K=" << s.K << '\n';
            auto it = cfg.kappa.find(s.name);
            os << "dataset." << s.name << ".kappa=" << fmt(it != cfg.kappa.end() ? it->second : cfg.default_kappa)
               << '\n';
        }
        os << "fit.delta=" << fmt(cfg.fit.delta) << '\n';
        os << "fit.epsilon=" << fmt(cfg.fit.epsilon) << '\n';
        os << "fit.xi=" << fmt(cfg.fit.xi) << '\n';
        os << "fit.max_em_iters=" << cfg.fit.max_em_iters << '\n';
        os << "granger.ar_order=" << cfg.granger.ar_order << '\n';
        os << "granger.alpha=" << fmt(cfg.granger.alpha) << '\n';
    }
}

}  // namespace

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
    cfg.validate();
    const int n_specs = static_cast<int>(cfg.specs.size());
    const int n_methods = static_cast<int>(cfg.methods.size());
    const int R = cfg.n_realizations;
    const int n_tasks = n_specs * R;

    // slot (spec, method, realization)
    std::vector<RealizationResult> slots(static_cast<size_t>(n_specs) * n_methods * R);
    auto slot = [&](int s, int m, int r) -> RealizationResult& {
        return slots[(static_cast<size_t>(s) * n_methods + m) * R + r];
    };

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int t = next++; t < n_tasks; t = next++) {
            const int s = t / R;
            const int r = t % R;
            DatasetSpec spec = cfg.specs[s];
            spec.seed = cfg.base_seed + static_cast<std::uint64_t>(r);
            std::filesystem::path run_dir;
            if (!cfg.out_dir.empty()) {
                run_dir = cfg.out_dir / "runs" / (spec.name + "_r" + std::to_string(r));
                std::filesystem::create_directories(run_dir);
            }
            Dataset data;
            try {
                data = make_dataset(spec);
                if (!run_dir.empty()) io::write_matrix(run_dir / "A_true.csv", data.A_true);
            } catch (const std::exception& e) {
                for (int m = 0; m < n_methods; ++m) {
                    auto& out = slot(s, m, r);
                    out.dataset = spec.name;
                    out.method = cfg.methods[m];
                    out.realization = r;
                    out.seed = spec.seed;
                    out.error = e.what();
                }
                continue;
            }
            for (int m = 0; m < n_methods; ++m) slot(s, m, r) = run_one(cfg, data, cfg.methods[m], r, run_dir);
        }
    };
    if (cfg.jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < std::min(cfg.jobs, n_tasks); ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    BenchmarkResult res;
    res.realizations = slots;
    for (int s = 0; s < n_specs; ++s) {
        for (int m = 0; m < n_methods; ++m) {
            BenchmarkRow row;
            row.dataset = cfg.specs[s].name;
            row.method = cfg.methods[m];
            double rm = 0, acc = 0, prec = 0, rec = 0, spec = 0, f1 = 0, sec = 0;
            for (int r = 0; r < R; ++r) {
                const auto& x = slot(s, m, r);
                if (!x.ok) {
                    ++row.n_failed;
                    continue;
                }
                ++row.n_ok;
                rm += x.rmse;
                acc += x.scores.accuracy;
                prec += x.scores.precision;
                rec += x.scores.recall;
                spec += x.scores.specificity;
                f1 += x.scores.f1;
                sec += x.seconds;
            }
            const double nan = std::numeric_limits<double>::quiet_NaN();
            const double n = row.n_ok;
            row.rmse = n > 0 ? rm / n : nan;
            row.scores.accuracy = n > 0 ? acc / n : nan;
            row.scores.precision = n > 0 ? prec / n : nan;
            row.scores.recall = n > 0 ? rec / n : nan;
            row.scores.specificity = n > 0 ? spec / n : nan;
            row.scores.f1 = n > 0 ? f1 / n : nan;
            row.scores.threshold = kEdgeThreshold;
            row.seconds = n > 0 ? sec / n : nan;
            res.rows.push_back(row);
        }
    }
    if (!cfg.out_dir.empty()) write_outputs(cfg, res);
    return res;
}

ChannelStudyResult run_channel_study(const ChannelStudyConfig& cfg) {
    if (!cfg.spec.is_channel()) throw std::invalid_argument("channel study needs dataset E or F");
    if (cfg.jobs < 1) throw std::invalid_argument("jobs must be positive");
    cfg.mimo.validate();
    const Dataset data = make_dataset(cfg.spec);
    const Observations& ys = data.trajectory.observations;

    ChannelStudyResult res;
    res.A_true = data.A_true;
    FitConfig f = cfg.fit;
    f.method = Method::MLEM;
    f.init_seed = cfg.spec.seed;
    res.A_mlem = fit(data.params, ys, f).A_hat;
    res.rmse_mlem = rmse(res.A_mlem, data.A_true);
    res.ber_mlem = mimo::track_and_ber(res.A_mlem, data.A_true, cfg.mimo, cfg.test_seed);

    const auto& kappas = cfg.mimo.kappas;
    res.graphem.resize(kappas.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next++; i < kappas.size(); i = next++) {
            FitConfig g = cfg.fit;
            g.method = Method::GraphEM;
            g.kappa = kappas[i];
            g.init_seed = cfg.spec.seed;
            g.penalty = SparsityPenalty::BlockL21;
            g.blocks = mimo::channel_block_map(cfg.mimo.L);
            const FitResult r = fit(data.params, ys, g);
            ChannelPoint& pt = res.graphem[i];
            pt.kappa = kappas[i];
            pt.rmse = rmse(r.A_hat, data.A_true);
            pt.ber = mimo::track_and_ber(r.A_hat, data.A_true, cfg.mimo, cfg.test_seed);
            pt.em_iters = r.em_iters;
        }
    };
    if (cfg.jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < std::min<int>(cfg.jobs, static_cast<int>(kappas.size())); ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return res;
}

}  // namespace graphem
