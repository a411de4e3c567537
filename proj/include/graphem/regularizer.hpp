#pragma once

// Penalty and constraint catalog for the transition-matrix prior.

#include "graphem/linalg.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace graphem {

enum class TermKind {
    L1,
    BlockL21,
    Gaussian,
    ElasticNet,
    SpectralBall,
    BoxRange,
    FrobeniusBall,
    SupportMask,
    Zero,
};

std::string_view to_string(TermKind kind);
TermKind term_kind_from_string(std::string_view name);

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Partition of the n x n entries into equal-size blocks of (row, col) pairs.
struct BlockMap {
    std::vector<std::vector<std::pair<int, int>>> blocks;

    /// Throws std::invalid_argument unless the blocks are equal-size, disjoint
    /// and cover every entry of an n x n matrix.
    void validate(int n) const;
    size_t block_size() const { return blocks.empty() ? 0 : blocks.front().size(); }
};

struct PenaltyTerm {
    TermKind kind = TermKind::Zero;
    double kappa = 0.0;  // weight (penalties)
    double delta = 0.0;  // radius (balls)
    double a_min = 0.0;  // bounds (box)
    double a_max = 0.0;
    BlockMap block_map;  // BlockL21
    BoolMatrix mask;     // SupportMask: true where entries may be nonzero

    static PenaltyTerm l1(double kappa);
    static PenaltyTerm block_l21(double kappa, BlockMap blocks);
    static PenaltyTerm gaussian(double kappa);
    static PenaltyTerm elastic_net(double kappa);
    static PenaltyTerm spectral_ball(double delta);
    static PenaltyTerm box(double a_min, double a_max);
    static PenaltyTerm frobenius_ball(double delta);
    static PenaltyTerm support_mask(BoolMatrix mask);
    static PenaltyTerm zero();

    bool is_constraint() const;

    /// Throws std::invalid_argument on invalid hyper-parameters for an n x n matrix.
    void validate(int n) const;

    /// f(A): penalty value, or 0 / +inf for constraints.
    double value(const Matrix& A) const;
};

/// Ordered list of prior terms; the last one is the sparsity-carrying term
/// whose prox produces the M-step output.
struct Regularizer {
    std::vector<PenaltyTerm> terms;

    double value(const Matrix& A) const;
    /// Sum of the finite-valued penalties, ignoring constraint indicators.
    double penalty_value(const Matrix& A) const;
    void validate(int n) const;
};

/// Relative tolerance applied when testing membership of constraint sets.
inline constexpr double kFeasibilityTol = 1e-9;

}  // namespace graphem
