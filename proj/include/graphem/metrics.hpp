#pragma once

// Scores of an estimated transition matrix against ground truth.

#include "graphem/linalg.hpp"

namespace graphem {

struct DetectionScores {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double specificity = 0.0;
    double f1 = 0.0;
    double threshold = 0.0;
};

inline constexpr double kEdgeThreshold = 1e-10;

/// Relative Frobenius error ||A_hat - A_true||_F / ||A_true||_F.
double rmse(const Matrix& A_hat, const Matrix& A_true);

/// Edge detection over all entries; an entry is an edge when |a| > threshold.
/// Ratios with an empty denominator are reported as 0.
DetectionScores detection(const Matrix& A_hat, const Matrix& A_true,
                          double threshold = kEdgeThreshold);

}  // namespace graphem
