#include "piq/losses.hpp"

#include <algorithm>
#include <cmath>

namespace piq {

namespace {

// log(1 + e^t) without overflow; outliers drive |eta| past 90 in the
// classification examples.
double log1p_exp(double t) {
    if (t > 0.0) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

void check_binary(double y) {
    require(y == 0.0 || y == 1.0, ErrorKind::data,
            "classification loss: response must be 0 or 1");
}

} // namespace

double LossModel::lipschitz() const {
    switch (kind) {
    case LossKind::quadratic: return 1.0;
    case LossKind::logistic: return 0.25;
    case LossKind::huber: return 1.0;
    case LossKind::huberized_hinge: return 1.0 / delta; // = 1 at the default delta
    }
    return 1.0;
}

double LossModel::value0(double eta, double y) const {
    switch (kind) {
    case LossKind::quadratic: {
        const double r = y - eta;
        return 0.5 * r * r;
    }
    case LossKind::logistic:
        return -y * eta + log1p_exp(eta);
    case LossKind::huber: {
        const double r = y - eta, a = std::abs(r);
        if (a <= delta) return 0.5 * r * r;
        return delta * a - 0.5 * delta * delta;
    }
    case LossKind::huberized_hinge: {
        const double m = (2.0 * y - 1.0) * eta;
        if (m >= 1.0) return 0.0;
        if (m > 1.0 - delta) {
            const double d = 1.0 - m;
            return d * d / (2.0 * delta);
        }
        return (1.0 - m) - 0.5 * delta;
    }
    }
    return 0.0;
}

double LossModel::grad0(double eta, double y) const {
    switch (kind) {
    case LossKind::quadratic:
        return eta - y;
    case LossKind::logistic:
        return -y + sigmoid(eta);
    case LossKind::huber: {
        const double r = y - eta;
        return -std::clamp(r, -delta, delta);
    }
    case LossKind::huberized_hinge: {
        const double s = 2.0 * y - 1.0;
        const double m = s * eta;
        if (m >= 1.0) return 0.0;
        if (m > 1.0 - delta) return -s * (1.0 - m) / delta;
        return -s;
    }
    }
    return 0.0;
}

double LossModel::curv0(double eta, double y) const {
    switch (kind) {
    case LossKind::quadratic:
        return 1.0;
    case LossKind::logistic: {
        const double s = sigmoid(eta);
        return s * (1.0 - s);
    }
    case LossKind::huber:
        return std::abs(y - eta) <= delta ? 1.0 : 0.0;
    case LossKind::huberized_hinge: {
        const double m = (2.0 * y - 1.0) * eta;
        return (m < 1.0 && m > 1.0 - delta) ? 1.0 / delta : 0.0;
    }
    }
    return 0.0;
}

std::string LossModel::name() const {
    switch (kind) {
    case LossKind::quadratic: return "quadratic";
    case LossKind::logistic: return "logistic";
    case LossKind::huber: return "huber:" + std::to_string(delta);
    case LossKind::huberized_hinge: return "hhinge:" + std::to_string(delta);
    }
    return "?";
}

LossModel parse_loss(const std::string& text) {
    auto parse_delta = [&](const std::string& prefix) {
        const std::string arg = text.substr(prefix.size());
        try {
            const double d = std::stod(arg);
            require(d > 0.0, ErrorKind::usage, "loss delta must be > 0");
            return d;
        } catch (const Error&) {
            throw;
        } catch (...) {
            throw_error(ErrorKind::usage, "cannot parse loss parameter: " + arg);
        }
    };
    if (text == "quadratic") return LossModel::quadratic();
    if (text == "logistic") return LossModel::logistic();
    if (text == "huber") return LossModel::huber(1.0);
    if (text == "hhinge") return LossModel::huberized_hinge(1.0);
    if (text.rfind("huber:", 0) == 0) return LossModel::huber(parse_delta("huber:"));
    if (text.rfind("hhinge:", 0) == 0)
        return LossModel::huberized_hinge(parse_delta("hhinge:"));
    throw_error(ErrorKind::usage,
                "unknown loss '" + text +
                    "'; expected quadratic|logistic|huber:<delta>|hhinge:<delta>");
}

void validate_response(const LossModel& model, const Eigen::Ref<const VectorXd>& y) {
    require(y.allFinite(), ErrorKind::data, "response: non-finite entries");
    if (model.is_classification())
        for (Index i = 0; i < y.size(); ++i) check_binary(y(i));
}

double loss_value(const LossModel& model, const Eigen::Ref<const VectorXd>& eta,
                  const Eigen::Ref<const VectorXd>& y) {
    require(eta.size() == y.size(), ErrorKind::dimension, "loss: eta/y length mismatch");
    require(eta.allFinite(), ErrorKind::data, "loss: non-finite eta");
    validate_response(model, y);
    double total = 0.0;
    for (Index i = 0; i < eta.size(); ++i) total += model.value0(eta(i), y(i));
    return total;
}

VectorXd loss_gradient(const LossModel& model, const Eigen::Ref<const VectorXd>& eta,
                       const Eigen::Ref<const VectorXd>& y) {
    require(eta.size() == y.size(), ErrorKind::dimension, "loss: eta/y length mismatch");
    require(eta.allFinite(), ErrorKind::data, "loss: non-finite eta");
    validate_response(model, y);
    VectorXd g(eta.size());
    for (Index i = 0; i < eta.size(); ++i) g(i) = model.grad0(eta(i), y(i));
    return g;
}

VectorXd loss_curvature(const LossModel& model, const Eigen::Ref<const VectorXd>& eta,
                        const Eigen::Ref<const VectorXd>& y) {
    VectorXd w(eta.size());
    for (Index i = 0; i < eta.size(); ++i) w(i) = model.curv0(eta(i), y(i));
    return w;
}

UnivariateMin gamma_univariate_min(const LossModel& model, double a, double y,
                                   double nu) {
    require(nu >= 0.0, ErrorKind::usage, "gamma_univariate_min: nu must be >= 0");

    if (model.kind == LossKind::quadratic) {
        const double t = (y - a) / (1.0 + nu);
        const double r = y - a - t;
        return {t, 0.5 * r * r + 0.5 * nu * t * t};
    }

    auto phi = [&](double t) { return model.value0(a + t, y) + 0.5 * nu * t * t; };
    auto dphi = [&](double t) { return model.grad0(a + t, y) + nu * t; };

    // Bracket a sign change of dphi, expanding geometrically. Without it the
    // infimum sits in the tail (nu = 0 logistic). The cap scales with the
    // offset: separable fits hand in |a| in the thousands and the tail root
    // sits near |a| + O(log(1/nu)).
    const double t_cap = std::max(1024.0, 8.0 * (std::abs(a) + std::abs(y) + 1.0));
    double lo = 0.0, hi = 0.0;
    double d0 = dphi(0.0);
    if (d0 == 0.0) return {0.0, phi(0.0)};
    if (d0 > 0.0) {
        hi = 0.0;
        double step = 1.0;
        lo = -step;
        while (dphi(lo) > 0.0) {
            if (step >= t_cap) return {lo, phi(lo)};
            step *= 2.0;
            lo = -step;
        }
    } else {
        lo = 0.0;
        double step = 1.0;
        hi = step;
        while (dphi(hi) < 0.0) {
            if (step >= t_cap) return {hi, phi(hi)};
            step *= 2.0;
            hi = step;
        }
    }

    // Safeguarded Newton: fall back to bisection whenever the Newton step
    // leaves the bracket or curvature vanishes.
    double t = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double d = dphi(t);
        if (std::abs(d) <= 1e-10 * (1.0 + std::abs(t))) return {t, phi(t)};
        if (d > 0.0)
            hi = t;
        else
            lo = t;
        const double c = model.curv0(a + t, y) + nu;
        double t_next = c > 0.0 ? t - d / c : 0.5 * (lo + hi);
        if (!(t_next > lo && t_next < hi)) t_next = 0.5 * (lo + hi);
        if (t_next == t) return {t, phi(t)};
        t = t_next;
    }
    // Bisection converges to ~1e-16 bracket width well before 200 rounds;
    // reaching here means the derivative tolerance is unattainable in double.
    const double d = dphi(t);
    require(std::abs(d) <= 1e-8 * (1.0 + std::abs(t)), ErrorKind::numeric,
            "gamma_univariate_min: no convergence after 200 iterations");
    return {t, phi(t)};
}

double bregman_divergence(const LossModel& model, const Eigen::Ref<const VectorXd>& alpha,
                          const Eigen::Ref<const VectorXd>& beta,
                          const Eigen::Ref<const VectorXd>& y) {
    require(alpha.size() == beta.size() && beta.size() == y.size(), ErrorKind::dimension,
            "bregman_divergence: length mismatch");
    const VectorXd g = loss_gradient(model, beta, y);
    return loss_value(model, alpha, y) - loss_value(model, beta, y) -
           g.dot(alpha - beta);
}

VectorXd effective_noise(const LossModel& model, const Dataset& data,
                         const Eigen::Ref<const VectorXd>& beta_star,
                         const Eigen::Ref<const VectorXd>& gamma_star) {
    require(beta_star.size() == data.p() && gamma_star.size() == data.n(),
            ErrorKind::dimension, "effective_noise: truth dimensions mismatch");
    const VectorXd eta = data.X * beta_star + gamma_star;
    return -loss_gradient(model, eta, data.y);
}

} // namespace piq
