#include "piq/solvers.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

namespace piq {

namespace {

constexpr double kSafety = 1.01; // inverse-stepsize margin over the Lipschitz bound

std::vector<Index> support_of(const VectorXd& v) {
    std::vector<Index> s;
    for (Index i = 0; i < v.size(); ++i)
        if (v(i) != 0.0) s.push_back(i);
    return s;
}

/// Top-q indices of `score` (desc), smallest index on ties; reports a tie at
/// the selection boundary.
std::pair<std::vector<Index>, TieReport> select_top(const VectorXd& score, Index q) {
    const Index n = score.size();
    std::vector<Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Index{0});
    TieReport report;
    if (q <= 0) return {{}, report};
    if (q >= n) {
        report.boundary_magnitude = n ? score.minCoeff() : 0.0;
        return {idx, report};
    }
    auto before = [&score](Index a, Index b) {
        if (score(a) != score(b)) return score(a) > score(b);
        return a < b;
    };
    std::nth_element(idx.begin(), idx.begin() + (q - 1), idx.end(), before);
    const double boundary = score(idx[static_cast<std::size_t>(q - 1)]);
    report.boundary_magnitude = boundary;
    if (boundary > 0.0)
        for (Index k = q; k < n; ++k)
            if (score(idx[static_cast<std::size_t>(k)]) == boundary) {
                report.tied = true;
                break;
            }
    idx.resize(static_cast<std::size_t>(q));
    return {idx, report};
}

/// Damped Newton for min_beta l(X beta + gamma; y), warm-started at beta0.
VectorXd newton_minimize(const MatrixXd& X, const VectorXd& y, const LossModel& loss,
                         const VectorXd& gamma, const VectorXd& beta0, double tol,
                         int max_iters = 100) {
    const Index p = X.cols();
    VectorXd beta = beta0;
    VectorXd eta = X * beta + gamma;
    double value = loss_value(loss, eta, y);
    for (int it = 0; it < max_iters; ++it) {
        const VectorXd g0 = loss_gradient(loss, eta, y);
        const VectorXd grad = X.transpose() * g0;
        if (grad.lpNorm<Eigen::Infinity>() <= tol) break;
        const VectorXd w = loss_curvature(loss, eta, y);
        MatrixXd hess = X.transpose() * w.asDiagonal() * X;
        const double jitter = 1e-12 * (hess.trace() / static_cast<double>(p) + 1.0);
        hess.diagonal().array() += jitter;
        VectorXd dir = hess.ldlt().solve(-grad);
        if (!dir.allFinite() || grad.dot(dir) >= 0.0) dir = -grad;
        double step = 1.0;
        const double slope = grad.dot(dir);
        for (int ls = 0; ls < 60; ++ls) {
            const VectorXd beta_try = beta + step * dir;
            const VectorXd eta_try = X * beta_try + gamma;
            const double value_try = loss_value(loss, eta_try, y);
            if (value_try <= value + 1e-4 * step * slope) {
                beta = beta_try;
                eta = eta_try;
                value = value_try;
                break;
            }
            step *= 0.5;
            if (ls == 59) return beta; // flat to machine precision
        }
    }
    return beta;
}

} // namespace

std::string solver_name(SolverKind kind) {
    switch (kind) {
    case SolverKind::iq_bcd_regression: return "iq-bcd";
    case SolverKind::mm_joint_regression: return "mm-joint";
    case SolverKind::bcd_general: return "bcd";
    case SolverKind::mm_general: return "mm";
    }
    return "?";
}

SolverKind parse_solver(const std::string& text) {
    if (text == "iq-bcd" || text == "iq_bcd") return SolverKind::iq_bcd_regression;
    if (text == "mm-joint" || text == "mm_joint") return SolverKind::mm_joint_regression;
    if (text == "bcd") return SolverKind::bcd_general;
    if (text == "mm") return SolverKind::mm_general;
    throw_error(ErrorKind::usage, "unknown solver '" + text +
                                      "'; expected iq-bcd|mm-joint|bcd|mm");
}

void FitConfig::validate(Index n, Index p) const {
    require(q_gamma >= 0, ErrorKind::usage, "q_gamma must be >= 0");
    require(2 * q_gamma <= n, ErrorKind::usage, "q_gamma must satisfy q <= n/2");
    require(nu >= 0.0 && nu_beta >= 0.0, ErrorKind::usage, "nu parameters must be >= 0");
    if (q_beta) {
        require(*q_beta >= 0 && *q_beta <= p, ErrorKind::usage, "q_beta out of [0, p]");
        require(solver == SolverKind::bcd_general, ErrorKind::unsupported,
                "beta cardinality constraints are handled by the bcd solver");
        require(!lambda, ErrorKind::usage, "q_beta and lambda are mutually exclusive");
    }
    if (lambda) {
        require(*lambda >= 0.0, ErrorKind::usage, "lambda must be >= 0");
        require(solver == SolverKind::mm_general || solver == SolverKind::bcd_general,
                ErrorKind::unsupported, "penalized beta requires the mm or bcd solver");
        require(beta_rule != ThresholdKind::quantile, ErrorKind::unsupported,
                "penalized beta uses a soft or hard rule");
    }
    if (beta_schedule) {
        require(q_beta.has_value(), ErrorKind::usage,
                "beta_schedule requires q_beta");
        require(beta_schedule->lower == *q_beta, ErrorKind::usage,
                "beta_schedule target must equal q_beta");
        require(beta_schedule->upper <= p, ErrorKind::usage, "beta_schedule upper > p");
    }
    if (gamma_schedule) {
        require(gamma_schedule->lower == q_gamma, ErrorKind::usage,
                "gamma_schedule target must equal q_gamma");
        require(gamma_schedule->upper <= n, ErrorKind::usage, "gamma_schedule upper > n");
    }
    if (rho.kind == StepSizeKind::fixed)
        require(rho.value > 0.0, ErrorKind::usage, "fixed inverse stepsize must be > 0");
    if (rho.kind == StepSizeKind::backtracking)
        require(rho.shrink > 0.0 && rho.shrink < 1.0, ErrorKind::usage,
                "backtracking shrink must be in (0,1)");
    require(max_iters >= 1, ErrorKind::usage, "max_iters must be >= 1");
    require(tol_objective > 0.0 && tol_iterate > 0.0, ErrorKind::usage,
            "tolerances must be > 0");
}

std::tuple<VectorXd, VectorXd, TieReport>
iq_bcd_regression_step(const Dataset& data, const Eigen::Ref<const VectorXd>& beta,
                       Index q, double nu) {
    require(beta.size() == data.p(), ErrorKind::dimension, "iq step: beta length != p");
    auto [gamma, report] = quantile_threshold(data.y - data.X * beta, {q, nu});
    VectorXd beta_next = pseudo_inverse_apply(data.X, data.y - gamma);
    return {std::move(beta_next), std::move(gamma), report};
}

VectorXd iq_line_step(const DesignFactorization& fac, const Eigen::Ref<const VectorXd>& y,
                      const Eigen::Ref<const VectorXd>& gamma, Index q, double nu,
                      TieReport* report) {
    const VectorXd arg = fac.apply_hat(gamma) + fac.apply_residual_projector(y);
    auto [out, tie] = quantile_threshold(arg, {q, nu});
    if (report) *report = tie;
    return out;
}

std::pair<VectorXd, VectorXd>
mm_joint_regression_step(const Dataset& data, const Eigen::Ref<const VectorXd>& beta,
                         const Eigen::Ref<const VectorXd>& gamma, double rho, Index q,
                         double nu) {
    require(rho > 0.0, ErrorKind::usage, "mm step: rho must be > 0");
    const VectorXd r = data.X * beta + gamma - data.y;
    VectorXd beta_next = beta - data.X.transpose() * r / rho;
    auto [gamma_next, tie] = quantile_threshold(gamma - r / rho, {q, nu / rho});
    (void)tie;
    return {std::move(beta_next), std::move(gamma_next)};
}

namespace {

/// Exact gamma subproblem: the support maximizes the total per-sample gain
/// delta_i = l0_i - min_t {l0(eta_i + t) + nu t^2/2}; on-support values are
/// the univariate minimizers. At nu = 0 the per-sample minimum is the
/// normalized infimum, zero for every built-in loss.
std::pair<VectorXd, TieReport> bcd_gamma_exact(const Dataset& data, const LossModel& loss,
                                               const VectorXd& eta, Index q, double nu) {
    const Index n = data.n();
    require(q >= 0 && q <= n, ErrorKind::dimension, "bcd step: q out of [0, n]");
    VectorXd delta(n), tstar(n);
    for (Index i = 0; i < n; ++i) {
        const double l0 = loss.value0(eta(i), data.y(i));
        const UnivariateMin um = gamma_univariate_min(loss, eta(i), data.y(i), nu);
        tstar(i) = um.t_star;
        const double lmin = (nu == 0.0) ? 0.0 : um.value;
        delta(i) = std::max(l0 - lmin, 0.0);
    }
    auto [sel, tie] = select_top(delta, q);
    VectorXd gamma_next = VectorXd::Zero(n);
    for (Index i : sel) gamma_next(i) = tstar(i);
    return {std::move(gamma_next), tie};
}

} // namespace

std::tuple<VectorXd, VectorXd, TieReport>
bcd_general_step(const Dataset& data, const LossModel& loss,
                 const Eigen::Ref<const VectorXd>& beta, Index q, double nu,
                 const BetaUpdate& bu) {
    const VectorXd eta = data.X * beta;
    auto [gamma_next, tie] = bcd_gamma_exact(data, loss, eta, q, nu);

    VectorXd beta_next;
    if (bu.q_beta) {
        require(bu.rho > 0.0, ErrorKind::usage, "bcd step: beta stepsize must be > 0");
        const VectorXd g = loss_gradient(loss, eta + gamma_next, data.y);
        const VectorXd arg = beta - data.X.transpose() * g / bu.rho;
        beta_next = quantile_threshold(arg, {*bu.q_beta, bu.nu_beta / bu.rho}).first;
    } else if (bu.lambda) {
        require(bu.rho > 0.0, ErrorKind::usage, "bcd step: beta stepsize must be > 0");
        const double varrho = std::sqrt(bu.rho);
        const VectorXd g = loss_gradient(loss, eta + gamma_next, data.y);
        ThresholdRule rule{bu.rule, *bu.lambda, {}};
        beta_next =
            apply_threshold(rule, varrho * beta - data.X.transpose() * g / varrho) / varrho;
    } else {
        beta_next = newton_minimize(data.X, data.y, loss, gamma_next, beta, bu.newton_tol);
    }
    return {std::move(beta_next), std::move(gamma_next), tie};
}

std::pair<VectorXd, VectorXd>
mm_general_step(const Dataset& data, const LossModel& loss,
                const Eigen::Ref<const VectorXd>& beta,
                const Eigen::Ref<const VectorXd>& gamma, double varrho,
                const ThresholdRule& rule, Index q, double nu) {
    require(varrho > 0.0, ErrorKind::usage, "mm step: varrho must be > 0");
    require(rule.kind != ThresholdKind::quantile, ErrorKind::unsupported,
            "mm_general_step: beta rule must be soft or hard");
    const double rho = varrho * varrho;
    const VectorXd g = loss_gradient(loss, data.X * beta + gamma, data.y);
    VectorXd beta_next =
        apply_threshold(rule, varrho * beta - data.X.transpose() * g / varrho) / varrho;
    auto [gamma_next, tie] = quantile_threshold(gamma - g / rho, {q, nu / rho});
    (void)tie;
    return {std::move(beta_next), std::move(gamma_next)};
}

double fit_objective(const Dataset& data, const LossModel& loss, const FitConfig& config,
                     const Eigen::Ref<const VectorXd>& beta,
                     const Eigen::Ref<const VectorXd>& gamma, double varrho) {
    double f = loss_value(loss, data.X * beta + gamma, data.y) +
               0.5 * config.nu * gamma.squaredNorm();
    if (config.q_beta) {
        f += 0.5 * config.nu_beta * beta.squaredNorm();
    } else if (config.lambda) {
        ThresholdRule rule{config.beta_rule, *config.lambda, {}};
        for (Index j = 0; j < beta.size(); ++j)
            f += induced_penalty(rule, varrho * beta(j));
    }
    return f;
}

double backtracking_stepsize(const LossModel& loss, const Dataset& data,
                             BacktrackState& state, double shrink) {
    require(shrink > 0.0 && shrink < 1.0, ErrorKind::usage,
            "backtracking shrink must be in (0,1)");
    const VectorXd eta = data.X * state.beta + state.gamma;
    const double lval = loss_value(loss, eta, data.y);
    const VectorXd grad = loss_gradient(loss, eta, data.y);
    double rho = state.warm > 0.0 ? state.warm : 1.0;
    for (int k = 0; k <= 60; ++k) {
        const double varrho = std::sqrt(rho);
        VectorXd beta_next =
            apply_threshold(state.beta_rule,
                            varrho * state.beta - data.X.transpose() * grad / varrho) /
            varrho;
        VectorXd gamma_next =
            quantile_threshold(state.gamma - grad / rho, {state.q, state.nu / rho}).first;
        const VectorXd eta_next = data.X * beta_next + gamma_next;
        const double lhs = loss_value(loss, eta_next, data.y);
        const double quad = (beta_next - state.beta).squaredNorm() +
                            (gamma_next - state.gamma).squaredNorm();
        const double rhs = lval + grad.dot(eta_next - eta) + 0.5 * rho * quad;
        if (lhs <= rhs + 1e-12 * (1.0 + std::abs(lhs))) {
            state.warm = rho;
            return rho;
        }
        rho /= shrink;
    }
    throw_error(ErrorKind::numeric,
                "backtracking_stepsize: no majorizing stepsize after 60 expansions");
}

Estimate fit_piq(const Dataset& data, const LossModel& loss, const FitConfig& config,
                 const FitObserver& observer) {
    data.validate();
    validate_response(loss, data.y);
    const Index n = data.n(), p = data.p();
    config.validate(n, p);

    const bool regression_solver = config.solver == SolverKind::iq_bcd_regression ||
                                   config.solver == SolverKind::mm_joint_regression;
    require(!regression_solver || loss.kind == LossKind::quadratic,
            ErrorKind::unsupported,
            "solver '" + solver_name(config.solver) + "' requires the quadratic loss");

    const CoolingSchedule gs =
        config.gamma_schedule.value_or(CoolingSchedule::constant(config.q_gamma));
    const std::optional<CoolingSchedule> bs = config.beta_schedule;
    const Index horizon = std::max(gs.horizon, bs ? bs->horizon : Index{1});

    const double L = loss.lipschitz();
    std::optional<DesignFactorization> fac;
    if (config.solver == SolverKind::iq_bcd_regression) fac.emplace(data.X);

    // Inverse stepsize: the augmented-design bound for the joint MM updates,
    // the X-only bound for the bcd beta step and fixed-point verification.
    double rho = 0.0;
    BacktrackState bt;
    switch (config.rho.kind) {
    case StepSizeKind::fixed:
        rho = config.rho.value;
        break;
    case StepSizeKind::lipschitz_bound:
        if (config.solver == SolverKind::mm_joint_regression)
            rho = kSafety * augmented_spectral_norm_sq(data.X);
        else if (config.solver == SolverKind::mm_general)
            rho = kSafety * L * augmented_spectral_norm_sq(data.X);
        else
            rho = kSafety * L * spectral_norm_sq(data.X);
        break;
    case StepSizeKind::backtracking:
        bt.solver = config.solver;
        bt.q = config.q_gamma;
        bt.nu = config.nu;
        bt.beta_rule = ThresholdRule{config.beta_rule, config.lambda.value_or(0.0), {}};
        bt.warm = 1.0;
        rho = 1.0;
        break;
    }
    // The bcd beta-threshold step always uses the X-only Lipschitz bound.
    const double rho_beta_step = (config.rho.kind == StepSizeKind::fixed)
                                     ? config.rho.value
                                     : kSafety * L * spectral_norm_sq(data.X);

    VectorXd beta = VectorXd::Zero(p);
    VectorXd gamma = VectorXd::Zero(n);
    std::vector<double> trace;
    Index tie_events = 0;
    bool converged = false;
    double f_prev = std::numeric_limits<double>::infinity();
    Index t = 1;
    const Index cap = horizon + config.max_iters;
    std::vector<Index> idx_buffer;

    // bcd beta-step stepsize state: tracks the restricted norm at the
    // scheduled budget, guarded up to the dense bound.
    VectorXd tp_warm;
    double rho_beta_t = rho_beta_step;
    Index last_qbt = -9;

    for (; t <= cap; ++t) {
        const Index qt = gs.q_at(t);
        const Index qbt = bs ? bs->q_at(t) : (config.q_beta ? *config.q_beta : Index{-1});

        VectorXd beta_next, gamma_next;
        TieReport tie;
        switch (config.solver) {
        case SolverKind::iq_bcd_regression: {
            gamma_next = data.y - data.X * beta;
            tie = quantile_threshold_inplace(gamma_next, qt, config.nu, idx_buffer);
            beta_next = fac->solve(data.y - gamma_next);
            break;
        }
        case SolverKind::mm_joint_regression: {
            if (config.rho.kind == StepSizeKind::backtracking) {
                bt.beta = beta;
                bt.gamma = gamma;
                bt.q = qt;
                rho = backtracking_stepsize(loss, data, bt, config.rho.shrink);
            }
            const VectorXd r = data.X * beta + gamma - data.y;
            beta_next = beta - data.X.transpose() * r / rho;
            gamma_next = gamma - r / rho;
            tie = quantile_threshold_inplace(gamma_next, qt, config.nu / rho, idx_buffer);
            break;
        }
        case SolverKind::bcd_general: {
            const VectorXd eta = data.X * beta;
            std::tie(gamma_next, tie) = bcd_gamma_exact(data, loss, eta, qt, config.nu);
            if (config.q_beta) {
                if (config.rho.kind == StepSizeKind::fixed) {
                    rho_beta_t = config.rho.value;
                } else if (qbt != last_qbt) {
                    // The valid inverse stepsize scales with the restricted
                    // norm at the current budget, not the dense bound.
                    if (2 * qbt >= p) {
                        rho_beta_t = rho_beta_step;
                    } else {
                        const double est = truncated_power_estimate(
                            data.X, 2 * qbt, last_qbt < 0 ? 20 : 4, &tp_warm);
                        rho_beta_t = est > 0.0 ? std::min(1.5 * L * est, rho_beta_step)
                                               : rho_beta_step;
                    }
                    last_qbt = qbt;
                }
                const VectorXd g = loss_gradient(loss, eta + gamma_next, data.y);
                const VectorXd xg = data.X.transpose() * g;
                auto beta_step = [&](double rho_b) {
                    return quantile_threshold(beta - xg / rho_b,
                                              {qbt, config.nu_beta / rho_b})
                        .first;
                };
                beta_next = beta_step(rho_beta_t);
                if (config.rho.kind != StepSizeKind::fixed) {
                    // Descent guard on the beta block: double the inverse
                    // stepsize until the surrogate step stops increasing the
                    // objective (the dense bound always passes).
                    const double f_mid =
                        fit_objective(data, loss, config, beta, gamma_next);
                    double f_after =
                        fit_objective(data, loss, config, beta_next, gamma_next);
                    while (f_after > f_mid + 1e-12 * (1.0 + std::abs(f_mid)) &&
                           rho_beta_t < rho_beta_step) {
                        rho_beta_t = std::min(2.0 * rho_beta_t, rho_beta_step);
                        beta_next = beta_step(rho_beta_t);
                        f_after =
                            fit_objective(data, loss, config, beta_next, gamma_next);
                    }
                }
            } else if (config.lambda) {
                const double varrho = std::sqrt(rho_beta_step);
                const VectorXd g = loss_gradient(loss, eta + gamma_next, data.y);
                ThresholdRule rule{config.beta_rule, *config.lambda, {}};
                beta_next = apply_threshold(rule, varrho * beta -
                                                      data.X.transpose() * g / varrho) /
                            varrho;
            } else {
                beta_next =
                    newton_minimize(data.X, data.y, loss, gamma_next, beta, 1e-8);
            }
            break;
        }
        case SolverKind::mm_general: {
            if (config.rho.kind == StepSizeKind::backtracking) {
                bt.beta = beta;
                bt.gamma = gamma;
                bt.q = qt;
                rho = backtracking_stepsize(loss, data, bt, config.rho.shrink);
            }
            const double varrho = std::sqrt(rho);
            ThresholdRule rule{config.beta_rule, config.lambda.value_or(0.0), {}};
            std::tie(beta_next, gamma_next) =
                mm_general_step(data, loss, beta, gamma, varrho, rule, qt, config.nu);
#ifndef NDEBUG
            {
                // Surrogate descent quantity of the MM theory; nonnegative
                // whenever rho exceeds L times the augmented-design norm.
                const VectorXd db = beta_next - beta, dg = gamma_next - gamma;
                const double quantity = rho * (db.squaredNorm() + dg.squaredNorm()) -
                                        L * (data.X * db + dg).squaredNorm();
                assert(config.rho.kind == StepSizeKind::backtracking ||
                       quantity >= -1e-10 * (1.0 + rho));
            }
#endif
            break;
        }
        }

        const double varrho_now = std::sqrt(std::max(rho, 0.0));
        const double f = fit_objective(data, loss, config, beta_next, gamma_next,
                                       varrho_now > 0.0 ? varrho_now : 1.0);
        trace.push_back(f);
        tie_events += tie.tied ? 1 : 0;
        if (observer) observer(t, beta_next, gamma_next, f);

        const double change = std::sqrt((beta_next - beta).squaredNorm() +
                                        (gamma_next - gamma).squaredNorm());
        beta = std::move(beta_next);
        gamma = std::move(gamma_next);

        if (t > horizon) {
            const bool obj_ok =
                std::abs(f_prev - f) <= config.tol_objective * (1.0 + std::abs(f));
            const bool iter_ok = change <= config.tol_iterate;
            if (obj_ok && iter_ok) {
                converged = true;
                break;
            }
        }
        f_prev = f;
    }

    Estimate est;
    est.beta = std::move(beta);
    est.gamma = std::move(gamma);
    est.objective_trace = std::move(trace);
    est.support_gamma = support_of(est.gamma);
    est.support_beta = support_of(est.beta);
    est.iterations = std::min(t, cap);
    est.tie_events = tie_events;
    est.converged = converged;
    est.config = config;
    est.rho_used = (config.solver == SolverKind::iq_bcd_regression ||
                    config.solver == SolverKind::bcd_general)
                       ? (config.q_beta ? rho_beta_t : rho_beta_step)
                       : rho;
    est.fixed_point_residual = verify_fixed_point(data, loss, est, est.rho_used);

    est.metadata["loss"] = loss.name();
    est.metadata["solver"] = solver_name(config.solver);
    est.metadata["q_gamma"] = std::to_string(config.q_gamma);
    if (config.q_beta) est.metadata["q_beta"] = std::to_string(*config.q_beta);
    est.metadata["nu"] = std::to_string(config.nu);
    if (config.lambda) est.metadata["lambda"] = std::to_string(*config.lambda);
    est.metadata["cooling"] = gs.name();
    est.metadata["horizon"] = std::to_string(gs.horizon);
    est.metadata["rho"] = std::to_string(est.rho_used);
    est.metadata["standardize"] = config.standardized ? "true" : "false";
    est.metadata["seed"] = std::to_string(config.seed);
    return est;
}

double verify_fixed_point(const Dataset& data, const LossModel& loss,
                          const Estimate& estimate, double rho) {
    require(rho > 0.0, ErrorKind::usage, "verify_fixed_point: rho must be > 0");
    const FitConfig& config = estimate.config;
    const VectorXd g =
        loss_gradient(loss, data.X * estimate.beta + estimate.gamma, data.y);

    // BCD-family limit points satisfy the unit-stepsize thresholding
    // equations; MM limit points satisfy the same equations at the solver's
    // inverse stepsize (the support selection differs between the two).
    const bool mm_family = config.solver == SolverKind::mm_joint_regression ||
                           config.solver == SolverKind::mm_general;
    const double gamma_step = mm_family ? rho : 1.0;
    const VectorXd gq =
        quantile_threshold(estimate.gamma - g / gamma_step,
                           {config.q_gamma, config.nu / gamma_step})
            .first;
    const double r_gamma = (estimate.gamma - gq).lpNorm<Eigen::Infinity>();

    double r_beta = 0.0;
    const VectorXd xg = data.X.transpose() * g;
    if (config.q_beta) {
        const VectorXd bq = quantile_threshold(estimate.beta - xg / rho,
                                               {*config.q_beta, config.nu_beta / rho})
                                .first;
        r_beta = (estimate.beta - bq).lpNorm<Eigen::Infinity>();
    } else if (config.lambda) {
        const double varrho = std::sqrt(rho);
        ThresholdRule rule{config.beta_rule, *config.lambda, {}};
        const VectorXd bq =
            apply_threshold(rule, varrho * estimate.beta - xg / varrho) / varrho;
        r_beta = (estimate.beta - bq).lpNorm<Eigen::Infinity>();
    } else {
        r_beta = xg.lpNorm<Eigen::Infinity>() / rho;
    }
    return r_beta + r_gamma;
}

} // namespace piq
