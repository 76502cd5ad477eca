#pragma once

#include <Eigen/Dense>

#include <string>

#include "piq/dataset.hpp"
#include "piq/error.hpp"

namespace piq {

enum class LossKind { quadratic, logistic, huber, huberized_hinge };

/// Smooth sample-additive loss l(eta; y) = sum_i l0(eta_i; y_i), normalized so
/// the per-sample infimum over eta is 0 for every built-in kind.
struct LossModel {
    LossKind kind = LossKind::quadratic;
    double delta = 1.0; // huber / huberized-hinge transition width

    static LossModel quadratic() { return {LossKind::quadratic, 1.0}; }
    static LossModel logistic() { return {LossKind::logistic, 1.0}; }
    static LossModel huber(double delta) { return {LossKind::huber, delta}; }
    static LossModel huberized_hinge(double delta) {
        return {LossKind::huberized_hinge, delta};
    }

    bool is_classification() const {
        return kind == LossKind::logistic || kind == LossKind::huberized_hinge;
    }

    /// Gradient-Lipschitz bound of the componentwise derivative.
    double lipschitz() const;

    // Per-sample loss, derivative and curvature in eta.
    double value0(double eta, double y) const;
    double grad0(double eta, double y) const;
    double curv0(double eta, double y) const;

    std::string name() const;
};

LossModel parse_loss(const std::string& text); // quadratic|logistic|huber:d|hhinge:d

/// Validates y against the loss (classification kinds need y in {0,1}).
void validate_response(const LossModel& model, const Eigen::Ref<const VectorXd>& y);

double loss_value(const LossModel& model, const Eigen::Ref<const VectorXd>& eta,
                  const Eigen::Ref<const VectorXd>& y);

VectorXd loss_gradient(const LossModel& model, const Eigen::Ref<const VectorXd>& eta,
                       const Eigen::Ref<const VectorXd>& y);

VectorXd loss_curvature(const LossModel& model, const Eigen::Ref<const VectorXd>& eta,
                        const Eigen::Ref<const VectorXd>& y);

struct UnivariateMin {
    double t_star = 0.0;
    double value = 0.0;
};

/// Global minimizer of t -> l0(a + t; y) + nu t^2 / 2. Closed form for the
/// quadratic loss, safeguarded Newton/bisection otherwise. When nu = 0 and the
/// infimum is only attained in the limit (logistic), the returned t saturates
/// at the bracketing cap with value within ~1e-12 of the infimum.
UnivariateMin gamma_univariate_min(const LossModel& model, double a, double y, double nu);

/// Generalized Bregman divergence l(alpha) - l(beta) - <grad l(beta), alpha - beta>.
double bregman_divergence(const LossModel& model, const Eigen::Ref<const VectorXd>& alpha,
                          const Eigen::Ref<const VectorXd>& beta,
                          const Eigen::Ref<const VectorXd>& y);

/// Effective noise -grad l(X beta* + gamma*; y); diagnostic view of the data
/// relative to a supplied truth.
VectorXd effective_noise(const LossModel& model, const Dataset& data,
                         const Eigen::Ref<const VectorXd>& beta_star,
                         const Eigen::Ref<const VectorXd>& gamma_star);

} // namespace piq
