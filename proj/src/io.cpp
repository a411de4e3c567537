#include "graphem/io.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace graphem::io {

namespace {

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    return os;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const fs::path& path, size_t line) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
    if (first < last && *first == '+') ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        // from_chars does not accept "inf"/"nan" spellings from other writers
        const std::string t(first, last);
        if (t == "inf" || t == "Inf") return std::numeric_limits<double>::infinity();
        if (t == "-inf" || t == "-Inf") return -std::numeric_limits<double>::infinity();
        if (t == "nan" || t == "NaN") return std::numeric_limits<double>::quiet_NaN();
        throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": bad number '" + t + "'");
    }
    return v;
}

Table read_table(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    Table t;
    std::string line;
    size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (t.header.empty()) {
            t.header = split(line);
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != t.header.size()) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(t.header.size()) + " columns, got " +
                                     std::to_string(cells.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(parse_double(c, path, lineno));
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) throw std::runtime_error(path.string() + ": missing header row");
    return t;
}

void write_header(std::ostream& os, bool with_k, Eigen::Index cols) {
    if (with_k) os << "k" << (cols > 0 ? "," : "");
    for (Eigen::Index j = 0; j < cols; ++j) os << (j ? "," : "") << 'c' << j;
    os << '\n';
}

void write_row(std::ostream& os, const Matrix& M, Eigen::Index i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) os << (j ? "," : "") << format_double(M(i, j));
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

void write_matrix(const fs::path& path, const Matrix& M) {
    auto os = open_out(path);
    write_header(os, false, M.cols());
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        write_row(os, M, i);
        os << '\n';
    }
}

Matrix read_matrix(const fs::path& path) {
    const Table t = read_table(path);
    Matrix M(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(t.header.size()));
    for (size_t i = 0; i < t.rows.size(); ++i)
        for (size_t j = 0; j < t.header.size(); ++j) M(i, j) = t.rows[i][j];
    return M;
}

void write_bool_matrix(const fs::path& path, const BoolMatrix& M) {
    write_matrix(path, M.cast<double>().matrix());
}

BoolMatrix read_bool_matrix(const fs::path& path) {
    const Matrix M = read_matrix(path);
    for (Eigen::Index j = 0; j < M.cols(); ++j)
        for (Eigen::Index i = 0; i < M.rows(); ++i)
            if (M(i, j) != 0.0 && M(i, j) != 1.0)
                throw std::runtime_error(path.string() + ": boolean matrix entries must be 0 or 1");
    return M.array() != 0.0;
}

void write_sequence(const fs::path& path, const Sequence& seq) {
    auto os = open_out(path);
    const Eigen::Index cols = seq.items.empty() ? 0 : seq.items.front().cols();
    write_header(os, true, cols);
    for (size_t n = 0; n < seq.items.size(); ++n) {
        const Matrix& M = seq.items[n];
        if (M.cols() != cols) throw std::invalid_argument("sequence matrices must share a column count");
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
            os << seq.first_k + static_cast<int>(n);
            if (cols > 0) os << ',';
            write_row(os, M, i);
            os << '\n';
        }
    }
}

Sequence read_sequence(const fs::path& path) {
    const Table t = read_table(path);
    if (t.header.empty() || t.header.front() != "k") {
        throw std::runtime_error(path.string() + ": sequence file needs a leading 'k' column");
    }
    std::map<int, std::vector<const std::vector<double>*>> by_k;
    for (const auto& row : t.rows) {
        const int k = static_cast<int>(row.front());
        if (row.front() != k) throw std::runtime_error(path.string() + ": non-integer k");
        by_k[k].push_back(&row);
    }
    Sequence seq;
    if (by_k.empty()) return seq;
    seq.first_k = by_k.begin()->first;
    int expect = seq.first_k;
    for (const auto& [k, rows] : by_k) {
        if (k != expect++) throw std::runtime_error(path.string() + ": k values are not consecutive");
        Matrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.header.size() - 1));
        for (size_t i = 0; i < rows.size(); ++i)
            for (size_t j = 1; j < t.header.size(); ++j) M(i, j - 1) = (*rows[i])[j];
        seq.items.push_back(std::move(M));
    }
    return seq;
}

void write_sequence_files(const fs::path& dir, const std::string& prefix, const Sequence& seq) {
    fs::create_directories(dir);
    for (size_t n = 0; n < seq.items.size(); ++n) {
        write_matrix(dir / (prefix + "_" + std::to_string(seq.first_k + static_cast<int>(n)) + ".csv"),
                     seq.items[n]);
    }
}

Sequence read_sequence_files(const fs::path& dir, const std::string& prefix) {
    std::map<int, fs::path> files;
    const std::string lead = prefix + "_";
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() <= lead.size() + 4 || name.compare(0, lead.size(), lead) != 0) continue;
        if (entry.path().extension() != ".csv") continue;
        const std::string idx = name.substr(lead.size(), name.size() - lead.size() - 4);
        int k = 0;
        auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), k);
        if (ec != std::errc() || ptr != idx.data() + idx.size()) continue;
        files[k] = entry.path();
    }
    Sequence seq;
    if (files.empty()) throw std::runtime_error("no files matching " + (dir / (lead + "<k>.csv")).string());
    seq.first_k = files.begin()->first;
    int expect = seq.first_k;
    for (const auto& [k, p] : files) {
        if (k != expect++) throw std::runtime_error(dir.string() + ": missing " + lead + std::to_string(k - 1) + ".csv");
        seq.items.push_back(read_matrix(p));
    }
    return seq;
}

void write_vectors(const fs::path& path, const std::vector<Vector>& vs, int first_k) {
    Sequence seq;
    seq.first_k = first_k;
    seq.items.reserve(vs.size());
    for (const auto& v : vs) seq.items.emplace_back(v.transpose());
    write_sequence(path, seq);
}

std::vector<Vector> read_vectors(const fs::path& path, int* first_k) {
    const Sequence seq = read_sequence(path);
    if (first_k) *first_k = seq.first_k;
    std::vector<Vector> out;
    out.reserve(seq.items.size());
    for (const auto& M : seq.items) {
        if (M.rows() != 1) throw std::runtime_error(path.string() + ": expected one row per k");
        out.emplace_back(M.transpose());
    }
    return out;
}

void write_columns(const fs::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns) {
    if (header.size() != columns.size()) throw std::invalid_argument("header/column count mismatch");
    auto os = open_out(path);
    for (size_t j = 0; j < header.size(); ++j) os << (j ? "," : "") << header[j];
    os << '\n';
    size_t n = 0;
    for (const auto& c : columns) n = std::max(n, c.size());
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < columns.size(); ++j) {
            if (j) os << ',';
            if (i < columns[j].size()) os << format_double(columns[j][i]);
        }
        os << '\n';
    }
}

}  // namespace graphem::io
