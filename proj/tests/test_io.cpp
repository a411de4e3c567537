#include "oracles.hpp"

#include "graphem/config.hpp"
#include "graphem/io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

using namespace graphem;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "graphem_test_io";
    fs::create_directories(dir);
    return dir / name;
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream os(p, std::ios::binary);
    os << s;
}

bool mentions(const std::exception& e, const std::string& what) {
    return std::string(e.what()).find(what) != std::string::npos;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("doubles round-trip through their text form") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, i % 40 - 20);
        CHECK(std::stod(io::format_double(v)) == v);
    }
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(-2.0) == "-2");
}

TEST_CASE("matrix round trip") {
    std::mt19937_64 rng(2);
    const Matrix M = oracle::random_matrix(4, 3, rng);
    const fs::path p = scratch("m.csv");
    io::write_matrix(p, M);
    CHECK(io::read_matrix(p) == M);

    BoolMatrix B(2, 3);
    B << true, false, true, false, false, true;
    io::write_bool_matrix(p, B);
    CHECK((io::read_bool_matrix(p) == B).all());
}

TEST_CASE("sequences round trip in both layouts") {
    std::mt19937_64 rng(3);
    io::Sequence seq;
    seq.first_k = 1;
    for (int k = 0; k < 4; ++k) seq.items.push_back(oracle::random_matrix(2, 3, rng));
    const fs::path p = scratch("seq.csv");
    io::write_sequence(p, seq);
    const io::Sequence back = io::read_sequence(p);
    CHECK(back.first_k == 1);
    REQUIRE(back.items.size() == 4);
    for (int k = 0; k < 4; ++k) CHECK(back.items[k] == seq.items[k]);

    const fs::path dir = scratch("seqdir");
    fs::remove_all(dir);
    io::write_sequence_files(dir, "H", seq);
    const io::Sequence files = io::read_sequence_files(dir, "H");
    CHECK(files.first_k == 1);
    REQUIRE(files.items.size() == 4);
    CHECK(files.items[3] == seq.items[3]);
}

TEST_CASE("vector trajectories have one line per step") {
    std::vector<Vector> xs;
    for (int k = 0; k < 5; ++k) xs.push_back(Vector::Constant(3, k + 0.5));
    const fs::path p = scratch("traj.csv");
    io::write_vectors(p, xs, 0);
    int first = -1;
    const auto back = io::read_vectors(p, &first);
    CHECK(first == 0);
    REQUIRE(back.size() == 5);
    CHECK(back[4] == xs[4]);
    std::ifstream is(p);
    int lines = 0;
    for (std::string l; std::getline(is, l);) ++lines;
    CHECK(lines == 6);
}

TEST_CASE("malformed files are rejected") {
    const fs::path p = scratch("bad.csv");
    write_text(p, "c0,c1\n1,2\n3\n");
    CHECK_THROWS_AS(io::read_matrix(p), std::runtime_error);
    write_text(p, "c0,c1\n1,abc\n");
    CHECK_THROWS_AS(io::read_matrix(p), std::runtime_error);
    write_text(p, "");
    CHECK_THROWS_AS(io::read_matrix(p), std::runtime_error);
    write_text(p, "k,c0\n1,1\n3,2\n");
    CHECK_THROWS_AS(io::read_sequence(p), std::runtime_error);
    write_text(p, "c0\n2\n");
    CHECK_THROWS_AS(io::read_bool_matrix(p), std::runtime_error);
    CHECK_THROWS_AS(io::read_matrix(scratch("missing.csv")), std::runtime_error);
}

TEST_CASE("named columns") {
    const fs::path p = scratch("cols.csv");
    io::write_columns(p, {"iteration", "loss"}, {{0, 1, 2}, {3.5, 2.5, 2.25}});
    const Matrix M = io::read_matrix(p);
    REQUIRE(M.rows() == 3);
    CHECK(M(2, 1) == 2.25);
    CHECK_THROWS_AS(io::write_columns(p, {"a"}, {{1}, {2}}), std::invalid_argument);
}

}  // TEST_SUITE

TEST_SUITE("config") {

TEST_CASE("parsing, comments and typed access") {
    const Config c = Config::parse(
        "# comment\n"
        "fit.kappa = 300   # trailing\n"
        "\n"
        "bench.datasets = A, B ,C\n"
        "fit.method=graphem\n"
        "ms.max_iters = 50\n"
        "flag = yes\n"
        "fit.kappa = 250\n");
    CHECK(c.get_double("fit.kappa", 0) == 250.0);
    CHECK(c.get_string("fit.method", "") == "graphem");
    CHECK(c.get_int("ms.max_iters", 0) == 50);
    CHECK(c.get_bool("flag", false));
    CHECK(c.get_list("bench.datasets") == std::vector<std::string>{"A", "B", "C"});
    CHECK(c.get_double("missing", 1.5) == 1.5);
    CHECK(c.echo().find("fit.kappa=250") != std::string::npos);
}

TEST_CASE("errors name the offending key") {
    const Config c = Config::parse("fit.kappa = abc\nms.max_iters = 2.5\nflag = maybe\n");
    try {
        c.get_double("fit.kappa", 0);
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(mentions(e, "fit.kappa"));
    }
    try {
        c.get_int("ms.max_iters", 0);
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(mentions(e, "ms.max_iters"));
    }
    CHECK_THROWS_AS(c.get_bool("flag", false), ConfigError);
    try {
        Config::parse("fit.kapa = 1\n").require_known({"fit.kappa"});
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(mentions(e, "fit.kapa"));
    }
    CHECK_THROWS_AS(Config::parse("no equals sign\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse(" = 3\n"), ConfigError);
    CHECK_THROWS_AS(Config::load(scratch("nope.cfg")), ConfigError);
}

TEST_CASE("files load and later values win") {
    const fs::path p = scratch("a.cfg");
    write_text(p, "seed = 7\nfit.kappa = 1e2\n");
    Config c = Config::load(p);
    CHECK(c.get_int("seed", 0) == 7);
    CHECK(c.get_double("fit.kappa", 0) == 100.0);
    c.set("seed", "9");
    CHECK(c.get_int("seed", 0) == 9);
    CHECK(c.get_double_list("none").empty());
    c.set("kappas", "10, 50,100");
    CHECK(c.get_double_list("kappas") == std::vector<double>{10, 50, 100});
}

}  // TEST_SUITE
