#pragma once

// Granger-causality edge detectors on the observed multivariate series.

#include "graphem/regularizer.hpp"
#include "graphem/ssm.hpp"

#include <string_view>

namespace graphem {

enum class GrangerMode { Pairwise, Conditional };

std::string_view to_string(GrangerMode mode);
GrangerMode granger_mode_from_string(std::string_view name);  // "pgc" | "cgc"

struct GrangerConfig {
    int ar_order = 1;
    double alpha = 0.05;
    GrangerMode mode = GrangerMode::Pairwise;

    void validate() const;
};

/// Adjacency with the transition-matrix convention: entry (i, j) is true when
/// series j Granger-causes series i. Self-edges are set true without testing.
/// Each off-diagonal entry is an F-test of the residual-variance reduction
/// from adding j's lags to the least-squares AR model of series i:
///   PGC  restricted {i},         unrestricted {i, j}
///   CGC  restricted all but {j}, unrestricted all
/// Regressions include an intercept.
BoolMatrix granger_graph(const Observations& ys, const GrangerConfig& cfg = {});

/// p-value of the F-test for one ordered pair (source j, target i).
/// Returns NaN when a regression is rank deficient.
double granger_pvalue(const Observations& ys, int target, int source, const GrangerConfig& cfg);

}  // namespace graphem
