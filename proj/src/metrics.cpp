#include "graphem/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace graphem {

double rmse(const Matrix& A_hat, const Matrix& A_true) {
    if (A_hat.rows() != A_true.rows() || A_hat.cols() != A_true.cols()) {
        throw std::invalid_argument("rmse: shape mismatch");
    }
    const double denom = A_true.norm();
    if (denom == 0.0) throw std::invalid_argument("rmse: ground truth is the zero matrix");
    return (A_hat - A_true).norm() / denom;
}

DetectionScores detection(const Matrix& A_hat, const Matrix& A_true, double threshold) {
    if (A_hat.rows() != A_true.rows() || A_hat.cols() != A_true.cols()) {
        throw std::invalid_argument("detection: shape mismatch");
    }
    double tp = 0, fp = 0, tn = 0, fn = 0;
    for (Eigen::Index j = 0; j < A_true.cols(); ++j) {
        for (Eigen::Index i = 0; i < A_true.rows(); ++i) {
            const bool est = std::abs(A_hat(i, j)) > threshold;
            const bool truth = std::abs(A_true(i, j)) > threshold;
            if (est && truth) ++tp;
            else if (est) ++fp;
            else if (truth) ++fn;
            else ++tn;
        }
    }
    auto ratio = [](double a, double b) { return b > 0.0 ? a / b : 0.0; };
    DetectionScores s;
    s.threshold = threshold;
    s.accuracy = ratio(tp + tn, tp + tn + fp + fn);
    s.precision = ratio(tp, tp + fp);
    s.recall = ratio(tp, tp + fn);
    s.specificity = ratio(tn, tn + fp);
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

}  // namespace graphem
