#include "piq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "piq/linalg.hpp"
#include "piq/solvers.hpp"

namespace piq {
namespace oracle {

namespace {

// Finite stand-in shrinkage for on-support entries whose exact minimizer may
// sit at infinity; matches the per-sample infimum to ~1e-12.
constexpr double kStandInNu = 1e-12;

/// Exact fit of beta on the kept rows: closed-form LS for the quadratic loss,
/// damped Newton otherwise (reuses the solver's inner minimizer through a
/// row-subset dataset).
VectorXd fit_subset(const Dataset& data, const LossModel& loss,
                    const std::vector<Index>& kept) {
    const Index m = static_cast<Index>(kept.size());
    Dataset sub;
    sub.X.resize(m, data.p());
    sub.y.resize(m);
    for (Index r = 0; r < m; ++r) {
        sub.X.row(r) = data.X.row(kept[static_cast<std::size_t>(r)]);
        sub.y(r) = data.y(kept[static_cast<std::size_t>(r)]);
    }
    if (loss.kind == LossKind::quadratic) return pseudo_inverse_apply(sub.X, sub.y);

    FitConfig cfg;
    cfg.solver = SolverKind::bcd_general;
    cfg.q_gamma = 0;
    cfg.nu = 0.0;
    cfg.max_iters = 5;
    const Estimate est = fit_piq(sub, loss, cfg);
    return est.beta;
}

double subset_loss(const Dataset& data, const LossModel& loss,
                   const Eigen::Ref<const VectorXd>& beta,
                   const std::vector<Index>& kept) {
    double total = 0.0;
    for (Index i : kept) total += loss.value0(data.X.row(i).dot(beta), data.y(i));
    return total;
}

} // namespace

double trimmed_objective(const Dataset& data, const LossModel& loss,
                         const Eigen::Ref<const VectorXd>& beta, Index q) {
    const Index n = data.n();
    require(q >= 0 && q <= n, ErrorKind::usage, "trimmed objective: q out of [0, n]");
    std::vector<double> losses(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        losses[static_cast<std::size_t>(i)] = loss.value0(data.X.row(i).dot(beta), data.y(i));
    std::sort(losses.begin(), losses.end());
    double total = 0.0;
    for (Index i = 0; i < n - q; ++i) total += losses[static_cast<std::size_t>(i)];
    return total;
}

double winsorized_objective(const Dataset& data, const LossModel& loss,
                            const Eigen::Ref<const VectorXd>& beta, double tau) {
    double total = 0.0;
    for (Index i = 0; i < data.n(); ++i)
        total += std::min(tau, loss.value0(data.X.row(i).dot(beta), data.y(i)));
    return total;
}

double sparse_shift_min_at_beta(const Dataset& data, const LossModel& loss,
                                const Eigen::Ref<const VectorXd>& beta, Index q,
                                const OracleBudget& budget) {
    const Index n = data.n();
    require(binomial(n, q) <= budget.max_enumerations, ErrorKind::budget,
            "oracle: enumeration budget exceeded");
    const VectorXd eta = data.X * beta;
    VectorXd shifted_min(n), base(n);
    for (Index i = 0; i < n; ++i) {
        base(i) = loss.value0(eta(i), data.y(i));
        // exact nu = 0 infimum; saturated tails evaluate to zero in double
        shifted_min(i) = gamma_univariate_min(loss, eta(i), data.y(i), 0.0).value;
    }
    double best = std::numeric_limits<double>::infinity();
    for_each_subset(n, q, [&](const std::vector<Index>& support) {
        double value = 0.0;
        std::size_t k = 0;
        for (Index i = 0; i < n; ++i) {
            if (k < support.size() && support[k] == i) {
                value += shifted_min(i);
                ++k;
            } else {
                value += base(i);
            }
        }
        best = std::min(best, value);
        return true;
    });
    return best;
}

TrimmedResult trimmed_min_exhaustive(const Dataset& data, const LossModel& loss, Index q,
                                     const OracleBudget& budget, double tie_tol) {
    data.validate();
    const Index n = data.n(), p = data.p();
    require(q >= 0 && q <= n, ErrorKind::usage, "trimmed oracle: q out of [0, n]");
    require(binomial(n, q) <= budget.max_enumerations, ErrorKind::budget,
            "trimmed oracle: enumeration budget exceeded");
    if (loss.kind == LossKind::quadratic)
        require(n - q >= p, ErrorKind::usage,
                "trimmed oracle: kept sample count below p breaks identifiability");

    TrimmedResult result;
    result.value = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, std::vector<Index>>> candidates;

    std::vector<Index> kept;
    kept.reserve(static_cast<std::size_t>(n - q));
    for_each_subset(n, q, [&](const std::vector<Index>& deleted) {
        ++result.enumerated;
        kept.clear();
        std::size_t k = 0;
        for (Index i = 0; i < n; ++i) {
            if (k < deleted.size() && deleted[k] == i)
                ++k;
            else
                kept.push_back(i);
        }
        const VectorXd beta = fit_subset(data, loss, kept);
        const double value = subset_loss(data, loss, beta, kept);
        candidates.emplace_back(value, deleted);
        if (value < result.value) {
            result.value = value;
            result.beta = beta;
        }
        return true;
    });

    for (auto& [value, deleted] : candidates)
        if (value <= result.value + tie_tol) result.optimal_supports.push_back(deleted);

    // Gamma certificate: finite stand-ins driving the deleted samples' losses
    // to their per-sample infima.
    result.gamma = VectorXd::Zero(n);
    if (!result.optimal_supports.empty()) {
        const VectorXd eta = data.X * result.beta;
        for (Index i : result.optimal_supports.front())
            result.gamma(i) =
                gamma_univariate_min(loss, eta(i), data.y(i), kStandInNu).t_star;
    }
    return result;
}

JointResult joint_min_exhaustive(const Dataset& data, const LossModel& loss, Index q,
                                 const OracleBudget& budget) {
    data.validate();
    const Index n = data.n();
    require(q >= 0 && q <= n, ErrorKind::usage, "joint oracle: q out of [0, n]");
    require(binomial(n, q) <= budget.max_enumerations, ErrorKind::budget,
            "joint oracle: enumeration budget exceeded");

    JointResult result;
    result.value = std::numeric_limits<double>::infinity();
    std::vector<Index> kept;
    for_each_subset(n, q, [&](const std::vector<Index>& support) {
        ++result.enumerated;
        kept.clear();
        std::size_t k = 0;
        for (Index i = 0; i < n; ++i) {
            if (k < support.size() && support[k] == i)
                ++k;
            else
                kept.push_back(i);
        }
        const VectorXd beta = fit_subset(data, loss, kept);
        // Explicit finite gamma; the value is the full loss including the
        // on-support samples, so the stand-in quality enters the comparison.
        VectorXd gamma = VectorXd::Zero(n);
        const VectorXd eta = data.X * beta;
        for (Index i : support)
            gamma(i) = gamma_univariate_min(loss, eta(i), data.y(i), kStandInNu).t_star;
        const double value = loss_value(loss, eta + gamma, data.y);
        if (value < result.value) {
            result.value = value;
            result.beta = beta;
            result.gamma = gamma;
            result.support = support;
        }
        return true;
    });
    return result;
}

WinsorizedResult winsorized_min_exhaustive(const Dataset& data, const LossModel& loss,
                                           double tau, const OracleBudget& budget,
                                           double half_width, Index grid) {
    data.validate();
    const Index p = data.p();
    require(p <= 2, ErrorKind::unsupported, "winsorized oracle: p <= 2 only");
    require(tau >= 0.0, ErrorKind::usage, "winsorized oracle: tau >= 0");
    WinsorizedResult result;
    if (tau == 0.0) {
        result.beta = VectorXd::Zero(p);
        result.value = 0.0;
        result.degenerate = true;
        return result;
    }
    const std::uint64_t cells = static_cast<std::uint64_t>(grid) *
                                (p == 2 ? static_cast<std::uint64_t>(grid) : 1);
    require(cells <= budget.max_enumerations, ErrorKind::budget,
            "winsorized oracle: grid budget exceeded");

    auto objective = [&](const VectorXd& beta) {
        return winsorized_objective(data, loss, beta, tau);
    };

    VectorXd best = VectorXd::Zero(p);
    double best_value = objective(best);
    const double step = 2.0 * half_width / static_cast<double>(grid - 1);
    VectorXd candidate(p);
    for (Index a = 0; a < grid; ++a) {
        candidate(0) = -half_width + step * static_cast<double>(a);
        if (p == 1) {
            const double v = objective(candidate);
            if (v < best_value) {
                best_value = v;
                best = candidate;
            }
        } else {
            for (Index b = 0; b < grid; ++b) {
                candidate(1) = -half_width + step * static_cast<double>(b);
                const double v = objective(candidate);
                if (v < best_value) {
                    best_value = v;
                    best = candidate;
                }
            }
        }
    }

    // Coordinate-wise golden-section polish inside the winning cell.
    const double gold = 0.6180339887498949;
    for (int sweep = 0; sweep < 6; ++sweep) {
        for (Index j = 0; j < p; ++j) {
            double lo = best(j) - step, hi = best(j) + step;
            VectorXd probe = best;
            for (int it = 0; it < 60; ++it) {
                const double m1 = hi - gold * (hi - lo);
                const double m2 = lo + gold * (hi - lo);
                probe(j) = m1;
                const double f1 = objective(probe);
                probe(j) = m2;
                const double f2 = objective(probe);
                if (f1 <= f2)
                    hi = m2;
                else
                    lo = m1;
            }
            probe(j) = 0.5 * (lo + hi);
            const double v = objective(probe);
            if (v <= best_value) {
                best_value = v;
                best = probe;
            }
        }
    }
    result.beta = best;
    result.value = best_value;
    return result;
}

RipReport rip_margin(const MatrixXd& X, Index support_size, double vartheta, double nu,
                     const OracleBudget& budget) {
    const Index n = X.rows();
    require(support_size >= 1 && support_size <= n, ErrorKind::usage,
            "rip_margin: support size out of [1, n]");
    require(binomial(n, support_size) <= budget.max_enumerations, ErrorKind::budget,
            "rip_margin: enumeration budget exceeded");
    require(vartheta >= 1.0, ErrorKind::usage, "rip_margin: vartheta >= 1");

    const HatMatrix hat = hat_matrix(X);
    double worst = 0.0;
    for_each_subset(n, support_size, [&](const std::vector<Index>& support) {
        const Index m = static_cast<Index>(support.size());
        MatrixXd sub(m, m);
        for (Index a = 0; a < m; ++a)
            for (Index b = 0; b < m; ++b)
                sub(a, b) = hat.H(support[static_cast<std::size_t>(a)],
                                  support[static_cast<std::size_t>(b)]);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(sub, Eigen::EigenvaluesOnly);
        worst = std::max(worst, es.eigenvalues().maxCoeff());
        return true;
    });

    RipReport report;
    report.support_size = support_size;
    report.vartheta = vartheta;
    report.nu = nu;
    report.epsilon = std::clamp(1.0 - worst, 0.0, 1.0);
    const double root = 1.0 / std::sqrt(vartheta);
    report.satisfied = report.epsilon + (1.0 - root) * nu > root;
    const double denom = 1.0 - report.epsilon;
    report.kappa = denom > 0.0
                       ? (report.epsilon - root + (1.0 - root) * nu) / denom
                       : std::numeric_limits<double>::infinity();
    return report;
}

} // namespace oracle
} // namespace piq
