#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "piq/cooling.hpp"
#include "piq/dataset.hpp"
#include "piq/linalg.hpp"
#include "piq/losses.hpp"
#include "piq/thresholding.hpp"

namespace piq {

enum class SolverKind { iq_bcd_regression, mm_joint_regression, bcd_general, mm_general };

std::string solver_name(SolverKind kind);
SolverKind parse_solver(const std::string& text);

enum class StepSizeKind { fixed, lipschitz_bound, backtracking };

struct StepSizePolicy {
    StepSizeKind kind = StepSizeKind::lipschitz_bound;
    double value = 0.0;  // fixed inverse stepsize
    double shrink = 0.5; // backtracking shrink factor in (0,1)
};

struct FitConfig {
    SolverKind solver = SolverKind::iq_bcd_regression;
    Index q_gamma = 0;
    std::optional<Index> q_beta;
    double nu = 1e-4;
    double nu_beta = 1e-4;
    std::optional<double> lambda; // penalized-beta variants (mm_general / bcd_general)
    ThresholdKind beta_rule = ThresholdKind::soft;
    StepSizePolicy rho;
    std::optional<CoolingSchedule> gamma_schedule; // absent: constant at q_gamma
    std::optional<CoolingSchedule> beta_schedule;
    Index max_iters = 2000; // cap counted after the schedules stabilize
    double tol_objective = 1e-9;
    double tol_iterate = 1e-7;
    std::uint64_t seed = 0;
    bool standardized = false;

    void validate(Index n, Index p) const;
};

struct Estimate {
    VectorXd beta;
    VectorXd gamma;
    std::vector<double> objective_trace;
    std::vector<Index> support_gamma;
    std::vector<Index> support_beta;
    double fixed_point_residual = 0.0;
    Index iterations = 0;
    Index tie_events = 0;
    bool converged = false;
    std::map<std::string, std::string> metadata;
    FitConfig config;
    double rho_used = 0.0; // inverse stepsize at the final iteration
};

// --- single steps (deterministic, stateless; fit_piq caches factorizations) ---

/// One BCD sweep for outlier-resistant least squares: exact quantile-threshold
/// gamma update followed by the minimum-norm LS beta refit.
std::tuple<VectorXd, VectorXd, TieReport>
iq_bcd_regression_step(const Dataset& data, const Eigen::Ref<const VectorXd>& beta,
                       Index q, double nu);

/// The gamma-only line form: gamma' = Theta#(H gamma + (I-H) y; q, nu).
VectorXd iq_line_step(const DesignFactorization& fac, const Eigen::Ref<const VectorXd>& y,
                      const Eigen::Ref<const VectorXd>& gamma, Index q, double nu,
                      TieReport* report = nullptr);

/// Joint MM update for the quadratic loss at inverse stepsize rho.
std::pair<VectorXd, VectorXd>
mm_joint_regression_step(const Dataset& data, const Eigen::Ref<const VectorXd>& beta,
                         const Eigen::Ref<const VectorXd>& gamma, double rho, Index q,
                         double nu);

/// Beta update mode for the general BCD sweep.
struct BetaUpdate {
    std::optional<Index> q_beta;  // scaled Theta# step at cardinality q_beta
    double nu_beta = 0.0;
    std::optional<double> lambda; // one scaled Theta step with this rule
    ThresholdKind rule = ThresholdKind::soft;
    double rho = 0.0;             // inverse stepsize for the thresholded paths
    double newton_tol = 1e-8;     // full inner minimization when neither is set
};

/// Exact gamma-subproblem solve (support from the q largest per-sample gains,
/// values from the univariate minimizers) followed by one beta update.
std::tuple<VectorXd, VectorXd, TieReport>
bcd_general_step(const Dataset& data, const LossModel& loss,
                 const Eigen::Ref<const VectorXd>& beta, Index q, double nu,
                 const BetaUpdate& beta_update);

/// Joint MM update for an arbitrary smooth loss with thresholding rule on beta.
std::pair<VectorXd, VectorXd>
mm_general_step(const Dataset& data, const LossModel& loss,
                const Eigen::Ref<const VectorXd>& beta,
                const Eigen::Ref<const VectorXd>& gamma, double varrho,
                const ThresholdRule& rule, Index q, double nu);

/// Objective value matching the solver family (loss + ridge terms + induced
/// beta penalty where applicable).
double fit_objective(const Dataset& data, const LossModel& loss, const FitConfig& config,
                     const Eigen::Ref<const VectorXd>& beta,
                     const Eigen::Ref<const VectorXd>& gamma, double varrho = 1.0);

using FitObserver = std::function<void(Index t, const VectorXd& beta,
                                       const VectorXd& gamma, double objective)>;

/// Progressive quantile-thresholding driver over the configured step family.
Estimate fit_piq(const Dataset& data, const LossModel& loss, const FitConfig& config,
                 const FitObserver& observer = nullptr);

/// Sum of the sup-norm residuals of the two thresholding fixed-point equations
/// at (beta, gamma); near zero at converged alternating minima.
double verify_fixed_point(const Dataset& data, const LossModel& loss,
                          const Estimate& estimate, double rho);

struct BacktrackState {
    SolverKind solver = SolverKind::mm_general;
    VectorXd beta;
    VectorXd gamma;
    Index q = 0;
    double nu = 0.0;
    ThresholdRule beta_rule = ThresholdRule::soft(0.0);
    double warm = 1.0; // last accepted inverse stepsize; reused next call
};

/// First inverse stepsize rho in the geometric sequence warm * shrink^{-k}
/// passing the surrogate-majorization test at the current iterate.
double backtracking_stepsize(const LossModel& loss, const Dataset& data,
                             BacktrackState& state, double shrink);

} // namespace piq
