#include "graphem/regularizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace graphem {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string_view to_string(TermKind kind) {
    switch (kind) {
        case TermKind::L1: return "l1";
        case TermKind::BlockL21: return "l21";
        case TermKind::Gaussian: return "gaussian";
        case TermKind::ElasticNet: return "elastic_net";
        case TermKind::SpectralBall: return "spectral_ball";
        case TermKind::BoxRange: return "box";
        case TermKind::FrobeniusBall: return "frobenius_ball";
        case TermKind::SupportMask: return "support_mask";
        case TermKind::Zero: return "zero";
    }
    return "unknown";
}

TermKind term_kind_from_string(std::string_view name) {
    for (auto k : {TermKind::L1, TermKind::BlockL21, TermKind::Gaussian, TermKind::ElasticNet,
                   TermKind::SpectralBall, TermKind::BoxRange, TermKind::FrobeniusBall,
                   TermKind::SupportMask, TermKind::Zero}) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown penalty kind '" + std::string(name) + "'");
}

void BlockMap::validate(int n) const {
    const size_t total = static_cast<size_t>(n) * static_cast<size_t>(n);
    if (blocks.empty()) throw std::invalid_argument("block map is empty");
    if (total % blocks.size() != 0) {
        throw std::invalid_argument("number of blocks must divide Nx^2");
    }
    const size_t size = total / blocks.size();
    std::vector<bool> seen(total, false);
    for (const auto& b : blocks) {
        if (b.size() != size) throw std::invalid_argument("blocks must have equal size");
        for (auto [i, j] : b) {
            if (i < 0 || j < 0 || i >= n || j >= n) {
                throw std::invalid_argument("block index out of range");
            }
            const size_t lin = static_cast<size_t>(i) * n + j;
            if (seen[lin]) throw std::invalid_argument("blocks overlap");
            seen[lin] = true;
        }
    }
}

PenaltyTerm PenaltyTerm::l1(double kappa) {
    PenaltyTerm t;
    t.kind = TermKind::L1;
    t.kappa = kappa;
    return t;
}

PenaltyTerm PenaltyTerm::block_l21(double kappa, BlockMap blocks) {
    PenaltyTerm t;
    t.kind = TermKind::BlockL21;
    t.kappa = kappa;
    t.block_map = std::move(blocks);
    return t;
}

PenaltyTerm PenaltyTerm::gaussian(double kappa) {
    PenaltyTerm t;
    t.kind = TermKind::Gaussian;
    t.kappa = kappa;
    return t;
}

PenaltyTerm PenaltyTerm::elastic_net(double kappa) {
    PenaltyTerm t;
    t.kind = TermKind::ElasticNet;
    t.kappa = kappa;
    return t;
}

PenaltyTerm PenaltyTerm::spectral_ball(double delta) {
    PenaltyTerm t;
    t.kind = TermKind::SpectralBall;
    t.delta = delta;
    return t;
}

PenaltyTerm PenaltyTerm::box(double a_min, double a_max) {
    PenaltyTerm t;
    t.kind = TermKind::BoxRange;
    t.a_min = a_min;
    t.a_max = a_max;
    return t;
}

PenaltyTerm PenaltyTerm::frobenius_ball(double delta) {
    PenaltyTerm t;
    t.kind = TermKind::FrobeniusBall;
    t.delta = delta;
    return t;
}

PenaltyTerm PenaltyTerm::support_mask(BoolMatrix mask) {
    PenaltyTerm t;
    t.kind = TermKind::SupportMask;
    t.mask = std::move(mask);
    return t;
}

PenaltyTerm PenaltyTerm::zero() { return PenaltyTerm{}; }

bool PenaltyTerm::is_constraint() const {
    switch (kind) {
        case TermKind::SpectralBall:
        case TermKind::BoxRange:
        case TermKind::FrobeniusBall:
        case TermKind::SupportMask: return true;
        default: return false;
    }
}

void PenaltyTerm::validate(int n) const {
    switch (kind) {
        case TermKind::L1:
        case TermKind::Gaussian:
        case TermKind::ElasticNet:
            if (!(kappa >= 0.0)) throw std::invalid_argument("penalty weight must be nonnegative");
            break;
        case TermKind::BlockL21:
            if (!(kappa >= 0.0)) throw std::invalid_argument("penalty weight must be nonnegative");
            block_map.validate(n);
            break;
        case TermKind::SpectralBall:
        case TermKind::FrobeniusBall:
            if (!(delta > 0.0)) throw std::invalid_argument("ball radius must be positive");
            break;
        case TermKind::BoxRange:
            if (!(a_min <= a_max)) throw std::invalid_argument("box requires a_min <= a_max");
            break;
        case TermKind::SupportMask:
            if (mask.rows() != n || mask.cols() != n) {
                throw std::invalid_argument("support mask has wrong shape");
            }
            break;
        case TermKind::Zero: break;
    }
}

double PenaltyTerm::value(const Matrix& A) const {
    switch (kind) {
        case TermKind::L1: return kappa * A.cwiseAbs().sum();
        case TermKind::BlockL21: {
            double s = 0.0;
            for (const auto& b : block_map.blocks) {
                double sq = 0.0;
                for (auto [i, j] : b) sq += A(i, j) * A(i, j);
                s += std::sqrt(sq);
            }
            return kappa * s;
        }
        case TermKind::Gaussian: return 0.5 * kappa * A.squaredNorm();
        case TermKind::ElasticNet: return kappa * (A.cwiseAbs().sum() + 0.5 * A.squaredNorm());
        case TermKind::SpectralBall:
            return spectral_norm(A) <= delta * (1.0 + kFeasibilityTol) ? 0.0 : kInf;
        case TermKind::FrobeniusBall:
            return A.norm() <= delta * (1.0 + kFeasibilityTol) ? 0.0 : kInf;
        case TermKind::BoxRange: {
            const double tol = kFeasibilityTol * (1.0 + std::max(std::abs(a_min), std::abs(a_max)));
            return (A.array() >= a_min - tol).all() && (A.array() <= a_max + tol).all() ? 0.0 : kInf;
        }
        case TermKind::SupportMask:
            for (Eigen::Index j = 0; j < A.cols(); ++j)
                for (Eigen::Index i = 0; i < A.rows(); ++i)
                    if (!mask(i, j) && A(i, j) != 0.0) return kInf;
            return 0.0;
        case TermKind::Zero: return 0.0;
    }
    return 0.0;
}

double Regularizer::value(const Matrix& A) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.value(A);
    return s;
}

double Regularizer::penalty_value(const Matrix& A) const {
    double s = 0.0;
    for (const auto& t : terms) {
        if (!t.is_constraint()) s += t.value(A);
    }
    return s;
}

void Regularizer::validate(int n) const {
    for (const auto& t : terms) t.validate(n);
}

}  // namespace graphem
