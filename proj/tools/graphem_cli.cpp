// graphem command-line tool: simulate, fit, bench, channel, granger.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error. Failures also print
// one machine-readable line "error: kind=<usage|runtime> message=<text>".

#include "graphem/baselines.hpp"
#include "graphem/config.hpp"
#include "graphem/experiments.hpp"
#include "graphem/io.hpp"
#include "graphem/log.hpp"
#include "graphem/plot.hpp"
#include "graphem/version.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace graphem;

namespace {

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

const std::set<std::string> kKnownKeys = {
    "seed", "jobs", "out", "data",
    "dataset", "dataset.blocks", "dataset.sigma_q", "dataset.sigma_r", "dataset.sigma_p",
    "dataset.K", "dataset.delta",
    "fit.method", "fit.kappa", "fit.delta", "fit.epsilon", "fit.xi", "fit.max_em_iters",
    "fit.init_seed", "fit.penalty", "fit.blocks", "fit.mask_file",
    "ms.lambda", "ms.gamma", "ms.max_iters", "ms.residual_tol", "ms.objective_scale",
    "bench.datasets", "bench.methods", "bench.n", "bench.kappa",
    "bench.kappa.A", "bench.kappa.B", "bench.kappa.C", "bench.kappa.D", "bench.kappa.E", "bench.kappa.F",
    "channel.dataset", "channel.kappas", "channel.K_train", "channel.test_steps", "channel.symbols",
    "channel.test_seed", "channel.ebn0_db", "channel.pilots",
    "granger.mode", "granger.ar_order", "granger.alpha",
};

struct Run {
    std::string command;
    std::vector<std::string> argv;
    Config cfg;
    std::vector<fs::path> outputs;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

std::string join(const std::vector<std::string>& xs, const char* sep = ",") {
    std::string out;
    for (size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
    return out;
}

std::uint64_t seed_of(const Config& cfg, std::uint64_t fallback) {
    return static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<long long>(fallback)));
}

void write_manifest(const Run& run, const fs::path& dir) {
    fs::create_directories(dir);
    std::ofstream os(dir / "manifest.txt", std::ios::binary);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - run.start).count();
    os << "tool=graphem\n";
    os << "version=" << kVersion << '\n';
    os << "command=" << run.command << '\n';
    os << "argv=" << join(run.argv, " ") << '\n';
    if (run.command != "granger") os << "seed=" << seed_of(run.cfg, run.command == "fit" ? 0 : 1) << '\n';
    for (const auto& [k, v] : run.cfg.values()) os << "config." << k << '=' << v << '\n';
    for (const auto& p : run.outputs) os << "output=" << p.filename().string() << '\n';
    os << "wall_time_s=" << wall << '\n';
}

fs::path required_path(const Config& cfg, const std::string& key, const std::string& flag) {
    const std::string v = cfg.get_string(key, "");
    if (v.empty()) throw UsageError("missing required option " + flag + " (config key '" + key + "')");
    return v;
}

// ---------------------------------------------------------------- data dirs

DatasetSpec spec_from_config(const Config& cfg) {
    const std::string name = cfg.get_string("dataset", "");
    DatasetSpec spec;
    if (name.empty()) {
        if (!cfg.has("dataset.blocks")) {
            throw UsageError("missing dataset: give --dataset A..F or config key 'dataset.blocks'");
        }
        spec.name = "custom";
    } else if (name == "custom") {
        spec.name = "custom";
    } else {
        try {
            spec = DatasetSpec::preset(name);
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("config key 'dataset': ") + e.what());
        }
    }
    if (cfg.has("dataset.blocks")) {
        spec.blocks.clear();
        for (double b : cfg.get_double_list("dataset.blocks")) spec.blocks.push_back(static_cast<int>(b));
    }
    spec.sigma_q = cfg.get_double("dataset.sigma_q", spec.sigma_q);
    spec.sigma_r = cfg.get_double("dataset.sigma_r", spec.sigma_r);
    spec.sigma_p = cfg.get_double("dataset.sigma_p", spec.sigma_p);
    spec.K = static_cast<int>(cfg.get_int("dataset.K", spec.K));
    spec.delta = cfg.get_double("dataset.delta", spec.delta);
    spec.seed = seed_of(cfg, 1);
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return spec;
}

struct LoadedData {
    ModelParams params;
    Observations ys;
    std::optional<Matrix> A_true;
};

LoadedData load_data(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw UsageError("data directory " + dir.string() + " does not exist");
    LoadedData d;
    d.ys = io::read_vectors(dir / "observations.csv");
    d.params.K = static_cast<int>(d.ys.size());
    d.params.Q = io::read_matrix(dir / "Q.csv");
    d.params.P0 = io::read_matrix(dir / "P0.csv");
    d.params.x0_mean = io::read_matrix(dir / "x0_mean.csv").transpose();
    if (fs::exists(dir / "H_seq.csv")) {
        d.params.H = io::read_sequence(dir / "H_seq.csv").items;
    } else {
        d.params.H = {io::read_matrix(dir / "H.csv")};
    }
    d.params.R = {io::read_matrix(dir / "R.csv")};
    if (fs::exists(dir / "A_true.csv")) d.A_true = io::read_matrix(dir / "A_true.csv");
    d.params.validate();
    return d;
}

// ---------------------------------------------------------------- commands

int cmd_simulate(Run& run) {
    const fs::path out = required_path(run.cfg, "out", "--out");
    const DatasetSpec spec = spec_from_config(run.cfg);
    const Dataset d = make_dataset(spec);
    fs::create_directories(out);
    auto put = [&](const std::string& name) { run.outputs.push_back(out / name); return out / name; };

    io::write_matrix(put("A_true.csv"), d.A_true);
    io::write_vectors(put("states.csv"), d.trajectory.states, 0);
    io::write_vectors(put("observations.csv"), d.trajectory.observations, 1);
    io::write_matrix(put("Q.csv"), d.params.Q);
    io::write_matrix(put("P0.csv"), d.params.P0);
    io::write_matrix(put("x0_mean.csv"), d.params.x0_mean.transpose());
    io::write_matrix(put("R.csv"), d.params.R.front());
    if (d.params.H.size() == 1) {
        io::write_matrix(put("H.csv"), d.params.H.front());
    } else {
        io::write_sequence(put("H_seq.csv"), io::Sequence{1, d.params.H});
    }
    {
        std::ofstream os(put("model.txt"), std::ios::binary);
        os << "dataset=" << spec.name << "\nseed=" << spec.seed << "\nK=" << spec.K
           << "\nstate_dim=" << d.params.state_dim() << "\nobs_dim=" << d.params.obs_dim()
           << "\nsigma_q=" << io::format_double(spec.sigma_q) << "\nsigma_r=" << io::format_double(spec.sigma_r)
           << "\nsigma_p=" << io::format_double(spec.sigma_p) << "\nensemble=" << kBlockEnsemble << '\n';
    }
    write_manifest(run, out);
    return 0;
}

FitConfig fit_config_from(const Config& cfg, int nx) {
    FitConfig f;
    f.kappa = cfg.get_double("fit.kappa", f.kappa);
    f.delta = cfg.get_double("fit.delta", f.delta);
    f.epsilon = cfg.get_double("fit.epsilon", f.epsilon);
    f.xi = cfg.get_double("fit.xi", f.xi);
    f.max_em_iters = static_cast<int>(cfg.get_int("fit.max_em_iters", f.max_em_iters));
    f.init_seed = static_cast<std::uint64_t>(cfg.get_int("fit.init_seed", static_cast<long long>(seed_of(cfg, 0))));
    f.ms.lambda = cfg.get_double("ms.lambda", f.ms.lambda);
    f.ms.gamma = cfg.get_double("ms.gamma", f.ms.gamma);
    f.ms.max_iters = static_cast<int>(cfg.get_int("ms.max_iters", f.ms.max_iters));
    f.ms.residual_tol = cfg.get_double("ms.residual_tol", f.ms.residual_tol);
    f.ms.objective_scale = cfg.get_double("ms.objective_scale", f.ms.objective_scale);
    const std::string pen = cfg.get_string("fit.penalty", "l1");
    if (pen == "l1") {
        f.penalty = SparsityPenalty::L1;
    } else if (pen == "l21") {
        f.penalty = SparsityPenalty::BlockL21;
        const std::string blocks = cfg.get_string("fit.blocks", "channel");
        if (blocks != "channel") throw UsageError("config key 'fit.blocks': only 'channel' is supported");
        const int L = static_cast<int>(std::lround(std::sqrt(nx / 2.0)));
        if (2 * L * L != nx) throw UsageError("config key 'fit.blocks': channel blocks need state_dim = 2 L^2");
        f.blocks = mimo::channel_block_map(L);
    } else {
        throw UsageError("config key 'fit.penalty': expected l1 or l21, got '" + pen + "'");
    }
    return f;
}

int cmd_fit(Run& run) {
    const fs::path data_dir = required_path(run.cfg, "data", "--data");
    Method method;
    try {
        method = method_from_string(run.cfg.get_string("fit.method", "graphem"));
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("config key 'fit.method': ") + e.what());
    }
    const LoadedData d = load_data(data_dir);
    const int nx = d.params.state_dim();
    FitConfig f = fit_config_from(run.cfg, nx);
    f.method = method;
    if (method == Method::GraphEM && !run.cfg.has("fit.kappa")) {
        throw UsageError("method graphem requires --kappa (config key 'fit.kappa')");
    }
    if (method == Method::OracleEM) {
        const std::string mask = run.cfg.get_string("fit.mask_file", "");
        if (mask.empty()) throw UsageError("method oracleem requires --mask (config key 'fit.mask_file')");
        f.support_mask = io::read_bool_matrix(mask);
    }
    if (d.A_true) f.A_true = *d.A_true;
    try {
        f.validate(nx);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const fs::path out = run.cfg.get_string("out", (data_dir / ("fit_" + std::string(to_string(method)))).string());
    const FitResult res = fit(d.params, d.ys, f);
    fs::create_directories(out);
    io::write_matrix(out / "A_hat.csv", res.A_hat);
    run.outputs.push_back(out / "A_hat.csv");

    std::vector<double> iters(res.loss_trace.size());
    std::iota(iters.begin(), iters.end(), 0.0);
    if (res.rmse_trace.empty()) {
        io::write_columns(out / "loss_trace.csv", {"iteration", "loss"}, {iters, res.loss_trace});
    } else {
        io::write_columns(out / "loss_trace.csv", {"iteration", "loss", "rmse"}, {iters, res.loss_trace, res.rmse_trace});
    }
    run.outputs.push_back(out / "loss_trace.csv");
    io::write_vectors(out / "smoothed_means.csv", res.smoother.m, 0);
    run.outputs.push_back(out / "smoothed_means.csv");

    plot::write_svg(out / "loss.svg", {"Loss per EM iteration (" + std::string(to_string(method)) + ")", "iteration", "loss"},
                    {{"loss", iters, res.loss_trace}});
    run.outputs.push_back(out / "loss.svg");
    if (!res.rmse_trace.empty()) {
        plot::write_svg(out / "rmse.svg", {"RMSE per EM iteration (" + std::string(to_string(method)) + ")", "iteration", "RMSE"},
                        {{"rmse", iters, res.rmse_trace}});
        run.outputs.push_back(out / "rmse.svg");
    }
    {
        std::ofstream os(out / "summary.txt", std::ios::binary);
        os << "method=" << to_string(method) << "\nem_iters=" << res.em_iters
           << "\nconverged=" << (res.converged ? 1 : 0) << "\nmstep_nonconverged=" << res.mstep_nonconverged << '\n';
        if (d.A_true) {
            const auto sc = detection(res.A_hat, *d.A_true);
            os << "rmse=" << io::format_double(rmse(res.A_hat, *d.A_true)) << "\naccuracy=" << io::format_double(sc.accuracy)
               << "\nprecision=" << io::format_double(sc.precision) << "\nrecall=" << io::format_double(sc.recall)
               << "\nspecificity=" << io::format_double(sc.specificity) << "\nf1=" << io::format_double(sc.f1) << '\n';
        }
        run.outputs.push_back(out / "summary.txt");
    }
    write_manifest(run, out);
    if (res.mstep_nonconverged > 0) {
        log::warn(res.mstep_nonconverged, " M-step solve(s) hit ms.max_iters");
    }
    return 0;
}

int cmd_bench(Run& run) {
    const fs::path out = required_path(run.cfg, "out", "--out");
    BenchmarkConfig b;
    const auto names = run.cfg.get_list("bench.datasets");
    if (names.empty()) throw UsageError("missing --datasets (config key 'bench.datasets')");
    for (const auto& n : names) {
        try {
            b.specs.push_back(DatasetSpec::preset(n));
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("config key 'bench.datasets': ") + e.what());
        }
    }
    b.methods = run.cfg.get_list("bench.methods");
    if (b.methods.empty()) b.methods = {"graphem", "stableem", "mlem", "pgc", "cgc", "oracleem"};
    for (const auto& m : b.methods) {
        if (m == kPgc || m == kCgc) continue;
        try {
            method_from_string(m);
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("config key 'bench.methods': ") + e.what());
        }
    }
    b.n_realizations = static_cast<int>(run.cfg.get_int("bench.n", 10));
    b.base_seed = seed_of(run.cfg, 1);
    b.default_kappa = run.cfg.get_double("bench.kappa", b.default_kappa);
    for (const char* n : {"A", "B", "C", "D", "E", "F"}) {
        const std::string key = std::string("bench.kappa.") + n;
        if (run.cfg.has(key)) b.kappa[n] = run.cfg.get_double(key, 0.0);
    }
    b.fit = fit_config_from(run.cfg, 0);
    b.granger.ar_order = static_cast<int>(run.cfg.get_int("granger.ar_order", 1));
    b.granger.alpha = run.cfg.get_double("granger.alpha", 0.05);
    b.jobs = static_cast<int>(run.cfg.get_int("jobs", 1));
    b.out_dir = out;
    try {
        b.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const BenchmarkResult res = run_benchmark(b);
    for (const char* f : {"results.csv", "timing.csv", "realizations.csv", "metadata.txt"}) run.outputs.push_back(out / f);

    // loss / RMSE traces of the first realization (EM methods)
    for (const auto& spec : b.specs) {
        std::vector<plot::Series> loss, err;
        for (const auto& m : b.methods) {
            const fs::path p = out / "runs" / (spec.name + "_r0") / (m + "_loss.csv");
            if (!fs::exists(p)) continue;
            const Matrix t = io::read_matrix(p);
            std::vector<double> it(t.rows()), l(t.rows()), r(t.rows());
            for (Eigen::Index i = 0; i < t.rows(); ++i) {
                it[i] = t(i, 0);
                l[i] = t(i, 1);
                r[i] = t(i, 2);
            }
            loss.push_back({m, it, l});
            err.push_back({m, it, r});
        }
        if (loss.empty()) continue;
        plot::write_svg(out / ("loss_" + spec.name + ".svg"), {"Loss, dataset " + spec.name + " (realization 0)", "iteration", "loss"}, loss);
        plot::write_svg(out / ("rmse_" + spec.name + ".svg"), {"RMSE, dataset " + spec.name + " (realization 0)", "iteration", "RMSE"}, err);
        run.outputs.push_back(out / ("loss_" + spec.name + ".svg"));
        run.outputs.push_back(out / ("rmse_" + spec.name + ".svg"));
    }
    write_manifest(run, out);

    int failed = 0;
    for (const auto& row : res.rows) failed += row.n_failed;
    std::cout << "dataset method rmse accuracy precision recall specificity f1 time_s\n";
    for (const auto& r : res.rows) {
        std::cout << r.dataset << ' ' << r.method << ' ' << r.rmse << ' ' << r.scores.accuracy << ' '
                  << r.scores.precision << ' ' << r.scores.recall << ' ' << r.scores.specificity << ' '
                  << r.scores.f1 << ' ' << r.seconds << '\n';
    }
    if (failed > 0) {
        throw std::runtime_error(std::to_string(failed) + " benchmark run(s) failed; see realizations.csv");
    }
    return 0;
}

int cmd_channel(Run& run) {
    const fs::path out = required_path(run.cfg, "out", "--out");
    ChannelStudyConfig c;
    const std::string name = run.cfg.get_string("channel.dataset", "E");
    if (name != "E" && name != "F") throw UsageError("config key 'channel.dataset': expected E or F, got '" + name + "'");
    c.spec = DatasetSpec::preset(name);
    c.spec.seed = seed_of(run.cfg, 1);
    c.spec.K = static_cast<int>(run.cfg.get_int("channel.K_train", c.spec.K));
    c.mimo.K_train = c.spec.K;
    c.mimo.kappas = run.cfg.has("channel.kappas") ? run.cfg.get_double_list("channel.kappas")
                                                  : std::vector<double>{10, 50, 100, 200, 400};
    if (c.mimo.kappas.empty()) throw UsageError("config key 'channel.kappas': empty list");
    c.mimo.K_test = static_cast<int>(run.cfg.get_int("channel.test_steps", 1000));
    c.mimo.symbols_per_step = static_cast<int>(run.cfg.get_int("channel.symbols", 100));
    c.mimo.ebn0_db = run.cfg.get_double("channel.ebn0_db", c.mimo.ebn0_db);
    c.mimo.seed = c.spec.seed;
    c.test_seed = static_cast<std::uint64_t>(run.cfg.get_int("channel.test_seed", static_cast<long long>(c.spec.seed + 1000)));
    c.fit = fit_config_from(run.cfg, c.spec.state_dim());
    c.jobs = static_cast<int>(run.cfg.get_int("jobs", 1));
    try {
        c.mimo.validate();
        c.spec.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const ChannelStudyResult res = run_channel_study(c);
    fs::create_directories(out);
    std::vector<double> ks, bg, bm, rg, rm;
    for (const auto& p : res.graphem) {
        ks.push_back(p.kappa);
        bg.push_back(p.ber);
        bm.push_back(res.ber_mlem);
        rg.push_back(p.rmse);
        rm.push_back(res.rmse_mlem);
    }
    io::write_columns(out / "ber.csv", {"kappa", "ber_graphem", "ber_mlem"}, {ks, bg, bm});
    io::write_columns(out / "rmse.csv", {"kappa", "rmse_graphem", "rmse_mlem"}, {ks, rg, rm});
    io::write_matrix(out / "A_true.csv", res.A_true);
    io::write_matrix(out / "A_mlem.csv", res.A_mlem);
    plot::write_svg(out / "ber.svg", {"BER vs kappa, dataset " + name, "kappa", "BER"},
                    {{"GraphEM", ks, bg}, {"MLEM", ks, bm}});
    plot::write_svg(out / "rmse.svg", {"RMSE vs kappa, dataset " + name, "kappa", "RMSE"},
                    {{"GraphEM", ks, rg}, {"MLEM", ks, rm}});
    for (const char* f : {"ber.csv", "rmse.csv", "A_true.csv", "A_mlem.csv", "ber.svg", "rmse.svg"}) run.outputs.push_back(out / f);
    {
        std::ofstream os(out / "channel.txt", std::ios::binary);
        os << "noise_variance=N0=1/(bits_per_symbol*10^(EbN0/10))\n"
           << "ebn0_db=" << io::format_double(c.mimo.ebn0_db) << "\nbits_per_symbol=" << c.mimo.bits_per_symbol()
           << "\nN0=" << io::format_double(c.mimo.noise_variance()) << "\npilots=uniform " << c.mimo.qam_order
           << "-QAM per step\n";
        run.outputs.push_back(out / "channel.txt");
    }
    write_manifest(run, out);
    return 0;
}

int cmd_granger(Run& run) {
    const fs::path data_dir = required_path(run.cfg, "data", "--data");
    GrangerConfig g;
    try {
        g.mode = granger_mode_from_string(run.cfg.get_string("granger.mode", "pgc"));
        g.ar_order = static_cast<int>(run.cfg.get_int("granger.ar_order", 1));
        g.alpha = run.cfg.get_double("granger.alpha", 0.05);
        g.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const Observations ys = io::read_vectors(data_dir / "observations.csv");
    const BoolMatrix adj = granger_graph(ys, g);
    const fs::path out = run.cfg.get_string("out", (data_dir / ("granger_" + std::string(to_string(g.mode)))).string());
    fs::create_directories(out);
    io::write_bool_matrix(out / "adjacency.csv", adj);
    run.outputs.push_back(out / "adjacency.csv");
    if (fs::exists(data_dir / "A_true.csv")) {
        const auto sc = detection(adj.cast<double>().matrix(), io::read_matrix(data_dir / "A_true.csv"));
        std::ofstream os(out / "summary.txt", std::ios::binary);
        os << "accuracy=" << io::format_double(sc.accuracy) << "\nprecision=" << io::format_double(sc.precision)
           << "\nrecall=" << io::format_double(sc.recall) << "\nspecificity=" << io::format_double(sc.specificity)
           << "\nf1=" << io::format_double(sc.f1) << '\n';
        run.outputs.push_back(out / "summary.txt");
    }
    write_manifest(run, out);
    return 0;
}

void fail_line(const char* kind, const std::string& msg) {
    std::string flat = msg;
    for (auto& c : flat)
        if (c == '\n') c = ' ';
    std::cerr << "error: kind=" << kind << " message=" << flat << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graphem: sparse transition-matrix estimation in linear-Gaussian state-space models"};
    app.set_version_flag("--version", std::string("graphem ") + kVersion);
    app.require_subcommand(1);

    std::string config_path, out, data, method, dataset, mask, penalty, mode, datasets, methods, kappas;
    long long seed = 0;
    int jobs = 1, n = 10, test_steps = 0, symbols = 0;
    double kappa = 0.0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value configuration file");
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--out", out, "output directory");
        sub->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);
    };

    auto* sim = app.add_subcommand("simulate", "simulate a dataset (A-F or custom via config)");
    common(sim);
    sim->add_option("--dataset", dataset, "dataset name A..F");

    auto* fitc = app.add_subcommand("fit", "estimate A from a simulated data directory");
    common(fitc);
    fitc->add_option("--data", data, "data directory written by simulate");
    fitc->add_option("--method", method, "graphem | mlem | stableem | oracleem");
    fitc->add_option("--kappa", kappa, "sparsity weight (graphem)");
    fitc->add_option("--mask", mask, "0/1 support mask CSV (oracleem)");
    fitc->add_option("--penalty", penalty, "l1 | l21");

    auto* bench = app.add_subcommand("bench", "benchmark table over datasets and methods");
    common(bench);
    bench->add_option("--datasets", datasets, "comma-separated dataset names");
    bench->add_option("--methods", methods, "comma-separated methods (graphem,stableem,mlem,oracleem,pgc,cgc)");
    bench->add_option("--n", n, "realizations per dataset")->check(CLI::PositiveNumber);
    bench->add_option("--kappa", kappa, "default sparsity weight for graphem");

    auto* chan = app.add_subcommand("channel", "MIMO channel-tracking BER sweep over kappa");
    common(chan);
    chan->add_option("--dataset", dataset, "E or F");
    chan->add_option("--kappa", kappas, "comma-separated kappa grid");
    chan->add_option("--test-steps", test_steps, "test time steps")->check(CLI::PositiveNumber);
    chan->add_option("--symbols", symbols, "data symbols per step")->check(CLI::PositiveNumber);

    auto* gr = app.add_subcommand("granger", "Granger-causality adjacency");
    common(gr);
    gr->add_option("--data", data, "data directory written by simulate");
    gr->add_option("--mode", mode, "pgc | cgc");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        fail_line("usage", e.what());
        return 2;
    }

    Run run;
    run.argv.assign(argv, argv + argc);
    CLI::App* sub = app.get_subcommands().front();
    run.command = sub->get_name();
    auto given = [&](const char* flag) { return sub->count(flag) > 0; };

    try {
        if (!config_path.empty()) run.cfg = Config::load(config_path);
        run.cfg.require_known(kKnownKeys);
        if (given("--seed")) run.cfg.set("seed", std::to_string(seed));
        if (given("--jobs")) run.cfg.set("jobs", std::to_string(jobs));
        if (given("--out")) run.cfg.set("out", out);
        if (run.command == "simulate" && given("--dataset")) run.cfg.set("dataset", dataset);
        if (run.command == "fit") {
            if (given("--data")) run.cfg.set("data", data);
            if (given("--method")) run.cfg.set("fit.method", method);
            if (given("--kappa")) run.cfg.set("fit.kappa", io::format_double(kappa));
            if (given("--mask")) run.cfg.set("fit.mask_file", mask);
            if (given("--penalty")) run.cfg.set("fit.penalty", penalty);
        }
        if (run.command == "bench") {
            if (given("--datasets")) run.cfg.set("bench.datasets", datasets);
            if (given("--methods")) run.cfg.set("bench.methods", methods);
            if (given("--n")) run.cfg.set("bench.n", std::to_string(n));
            if (given("--kappa")) run.cfg.set("bench.kappa", io::format_double(kappa));
        }
        if (run.command == "channel") {
            if (given("--dataset")) run.cfg.set("channel.dataset", dataset);
            if (given("--kappa")) run.cfg.set("channel.kappas", kappas);
            if (given("--test-steps")) run.cfg.set("channel.test_steps", std::to_string(test_steps));
            if (given("--symbols")) run.cfg.set("channel.symbols", std::to_string(symbols));
        }
        if (run.command == "granger") {
            if (given("--data")) run.cfg.set("data", data);
            if (given("--mode")) run.cfg.set("granger.mode", mode);
        }

        if (run.command == "simulate") return cmd_simulate(run);
        if (run.command == "fit") return cmd_fit(run);
        if (run.command == "bench") return cmd_bench(run);
        if (run.command == "channel") return cmd_channel(run);
        if (run.command == "granger") return cmd_granger(run);
        throw UsageError("unknown command " + run.command);
    } catch (const UsageError& e) {
        std::cerr << sub->help() << '\n';
        fail_line("usage", e.what());
        return 2;
    } catch (const ConfigError& e) {
        fail_line("usage", e.what());
        return 2;
    } catch (const std::exception& e) {
        fail_line("runtime", e.what());
        return 1;
    }
}
