#include "piq/thresholding.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace piq {

namespace {

bool all_finite(const Eigen::Ref<const VectorXd>& v) {
    return v.allFinite();
}

} // namespace

TieReport quantile_threshold_inplace(VectorXd& s, Index q, double nu,
                                     std::vector<Index>& idx) {
    const Index n = s.size();
    require(q >= 0 && q <= n, ErrorKind::dimension,
            "quantile_threshold: q out of range [0, n]");
    require(nu >= 0.0, ErrorKind::usage, "quantile_threshold: nu must be >= 0");

    TieReport report;
    if (q == 0) {
        s.setZero();
        return report;
    }
    if (q == n) {
        s /= (1.0 + nu);
        report.boundary_magnitude = s.size() ? s.cwiseAbs().minCoeff() : 0.0;
        return report;
    }

    idx.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;

    // Larger magnitude first; ties keep the smaller index (deterministic).
    auto before = [&s](Index a, Index b) {
        const double fa = std::abs(s[a]), fb = std::abs(s[b]);
        if (fa != fb) return fa > fb;
        return a < b;
    };
    std::nth_element(idx.begin(), idx.begin() + (q - 1), idx.end(), before);

    const Index boundary_index = idx[static_cast<std::size_t>(q - 1)];
    const double boundary = std::abs(s[boundary_index]);
    report.boundary_magnitude = boundary;

    // Tie iff some dropped entry matches the kept boundary magnitude (> 0).
    if (boundary > 0.0) {
        for (Index k = q; k < n; ++k) {
            if (std::abs(s[idx[static_cast<std::size_t>(k)]]) == boundary) {
                report.tied = true;
                break;
            }
        }
    }

    const double scale = 1.0 / (1.0 + nu);
    for (Index k = q; k < n; ++k) s[idx[static_cast<std::size_t>(k)]] = 0.0;
    for (Index k = 0; k < q; ++k) s[idx[static_cast<std::size_t>(k)]] *= scale;
    return report;
}

std::pair<VectorXd, TieReport> quantile_threshold(const Eigen::Ref<const VectorXd>& s,
                                                  const QuantileThresholdParams& params) {
    require(all_finite(s), ErrorKind::data, "quantile_threshold: non-finite input");
    VectorXd out = s;
    std::vector<Index> idx;
    TieReport report = quantile_threshold_inplace(out, params.q, params.nu, idx);
    return {std::move(out), report};
}

double soft_threshold(double t, double lambda) {
    const double a = std::abs(t) - lambda;
    return a > 0.0 ? (t > 0.0 ? a : -a) : 0.0;
}

double hard_threshold(double t, double lambda) {
    return std::abs(t) > lambda ? t : 0.0;
}

VectorXd apply_threshold(const ThresholdRule& rule, const Eigen::Ref<const VectorXd>& v) {
    require(all_finite(v), ErrorKind::data, "apply_threshold: non-finite input");
    switch (rule.kind) {
    case ThresholdKind::soft:
        return v.unaryExpr([&rule](double t) { return soft_threshold(t, rule.lambda); });
    case ThresholdKind::hard:
        return v.unaryExpr([&rule](double t) { return hard_threshold(t, rule.lambda); });
    case ThresholdKind::quantile:
        return quantile_threshold(v, rule.quantile).first;
    }
    throw_error(ErrorKind::usage, "apply_threshold: unknown rule kind");
}

double induced_penalty(const ThresholdRule& rule, double theta) {
    const double a = std::abs(theta);
    switch (rule.kind) {
    case ThresholdKind::soft:
        return rule.lambda * a;
    case ThresholdKind::hard: {
        const double lambda = rule.lambda;
        if (a < lambda) return -theta * theta / 2.0 + lambda * a;
        return lambda * lambda / 2.0;
    }
    case ThresholdKind::quantile:
        throw_error(ErrorKind::unsupported,
                    "induced_penalty: the quantile rule's penalty is a cardinality "
                    "constraint, not a separable function");
    }
    throw_error(ErrorKind::usage, "induced_penalty: unknown rule kind");
}

} // namespace piq
