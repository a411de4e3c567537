#pragma once

// CSV serialization. Every file has one header row and row-major entries.
//
//   matrix     c0,c1,...            one line per row
//   sequence   k,c0,c1,...          one line per matrix row, k = time index
//
// Sequences can also be stored one file per k (<prefix>_<k>.csv, plain matrix
// format). Vectors in a sequence are stored as 1 x n rows, so a trajectory
// file has exactly one line per time step.

#include "graphem/regularizer.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace graphem::io {

namespace fs = std::filesystem;

/// Shortest decimal representation that round-trips.
std::string format_double(double v);

void write_matrix(const fs::path& path, const Matrix& M);
Matrix read_matrix(const fs::path& path);

void write_bool_matrix(const fs::path& path, const BoolMatrix& M);  // 0/1 entries
BoolMatrix read_bool_matrix(const fs::path& path);

struct Sequence {
    int first_k = 0;
    std::vector<Matrix> items;  // items[i] is the matrix at k = first_k + i
};

void write_sequence(const fs::path& path, const Sequence& seq);
Sequence read_sequence(const fs::path& path);

void write_sequence_files(const fs::path& dir, const std::string& prefix, const Sequence& seq);
Sequence read_sequence_files(const fs::path& dir, const std::string& prefix);

void write_vectors(const fs::path& path, const std::vector<Vector>& vs, int first_k);
std::vector<Vector> read_vectors(const fs::path& path, int* first_k = nullptr);

/// Named columns under one header row (traces, sweeps).
void write_columns(const fs::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns);

}  // namespace graphem::io
