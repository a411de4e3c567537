#include "graphem/baselines.hpp"

#include "graphem/log.hpp"

#include <boost/math/distributions/fisher_f.hpp>

#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace graphem {

std::string_view to_string(GrangerMode mode) {
    return mode == GrangerMode::Pairwise ? "pgc" : "cgc";
}

GrangerMode granger_mode_from_string(std::string_view name) {
    std::string s(name);
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "pgc") return GrangerMode::Pairwise;
    if (s == "cgc") return GrangerMode::Conditional;
    throw std::invalid_argument("unknown Granger mode '" + std::string(name) + "' (expected pgc or cgc)");
}

void GrangerConfig::validate() const {
    if (ar_order < 1) throw std::invalid_argument("ar_order must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

namespace {

// Residual sum of squares of y on [1, lags of the given series]; NaN if the
// design is rank deficient.
double lagged_rss(const Matrix& Y, int target, const std::vector<int>& series, int p) {
    const auto T = Y.rows();
    const auto n = T - p;
    Matrix X(n, 1 + static_cast<Eigen::Index>(series.size()) * p);
    X.col(0).setOnes();
    Eigen::Index col = 1;
    for (int s : series)
        for (int lag = 1; lag <= p; ++lag) X.col(col++) = Y.col(s).segment(p - lag, n);
    const Vector y = Y.col(target).tail(n);

    Eigen::ColPivHouseholderQR<Matrix> qr(X);
    if (qr.rank() < X.cols()) return std::numeric_limits<double>::quiet_NaN();
    const Vector beta = qr.solve(y);
    return (y - X * beta).squaredNorm();
}

Matrix stack(const Observations& ys) {
    if (ys.empty()) throw std::invalid_argument("no observations");
    const auto d = ys.front().size();
    Matrix Y(static_cast<Eigen::Index>(ys.size()), d);
    for (size_t t = 0; t < ys.size(); ++t) {
        if (ys[t].size() != d) throw std::invalid_argument("observations have inconsistent dimension");
        Y.row(static_cast<Eigen::Index>(t)) = ys[t].transpose();
    }
    return Y;
}

double pvalue(const Matrix& Y, int target, int source, const GrangerConfig& cfg) {
    const int d = static_cast<int>(Y.cols());
    const int p = cfg.ar_order;
    std::vector<int> restricted, unrestricted;
    if (cfg.mode == GrangerMode::Pairwise) {
        restricted = {target};
        unrestricted = {target, source};
    } else {
        for (int s = 0; s < d; ++s) {
            unrestricted.push_back(s);
            if (s != source) restricted.push_back(s);
        }
    }
    const double rss_r = lagged_rss(Y, target, restricted, p);
    const double rss_u = lagged_rss(Y, target, unrestricted, p);
    if (std::isnan(rss_r) || std::isnan(rss_u)) return std::numeric_limits<double>::quiet_NaN();

    const double df1 = p;
    const double df2 = static_cast<double>(Y.rows() - p) - (1.0 + unrestricted.size() * p);
    if (df2 <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    if (rss_u <= 0.0) return 0.0;
    const double F = std::max(0.0, (rss_r - rss_u) / df1) / (rss_u / df2);
    boost::math::fisher_f dist(df1, df2);
    return boost::math::cdf(boost::math::complement(dist, F));
}

}  // namespace

double granger_pvalue(const Observations& ys, int target, int source, const GrangerConfig& cfg) {
    cfg.validate();
    const Matrix Y = stack(ys);
    const int d = static_cast<int>(Y.cols());
    if (target < 0 || target >= d || source < 0 || source >= d || target == source) {
        throw std::invalid_argument("granger_pvalue: invalid series pair");
    }
    return pvalue(Y, target, source, cfg);
}

BoolMatrix granger_graph(const Observations& ys, const GrangerConfig& cfg) {
    cfg.validate();
    const Matrix Y = stack(ys);
    const int d = static_cast<int>(Y.cols());
    if (Y.rows() <= 10LL * d * cfg.ar_order) {
        log::warn("granger: series length ", Y.rows(), " is short for ", d, " series at order ",
                  cfg.ar_order);
    }
    BoolMatrix adj = BoolMatrix::Constant(d, d, false);
    for (int i = 0; i < d; ++i) {
        adj(i, i) = true;
        for (int j = 0; j < d; ++j) {
            if (i == j) continue;
            const double pv = pvalue(Y, i, j, cfg);
            if (std::isnan(pv)) {
                log::warn("granger: rank-deficient regression for pair ", j, " -> ", i, "; edge not declared");
                continue;
            }
            adj(i, j) = pv < cfg.alpha;
        }
    }
    return adj;
}

}  // namespace graphem
