#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "piq/oracle.hpp"
#include "piq/simulate.hpp"
#include "piq/solvers.hpp"
#include "test_support.hpp"

using namespace piq;
using piq::testing::random_matrix;
using piq::testing::random_vector;

namespace {

Dataset make_dataset(const MatrixXd& X, const VectorXd& y) {
    Dataset d;
    d.X = X;
    d.y = y;
    return d;
}

/// Seeded regression instance with planted shifts on the first o rows.
Dataset shifted_instance(Index n, Index p, Index o, double magnitude,
                         std::uint64_t seed, VectorXd* beta_star = nullptr) {
    Rng rng(seed);
    MatrixXd X(n, p);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) X(i, j) = rng.normal();
    VectorXd beta(p);
    for (Index j = 0; j < p; ++j) beta(j) = rng.normal();
    VectorXd y = X * beta;
    for (Index i = 0; i < n; ++i) y(i) += 0.1 * rng.normal();
    for (Index i = 0; i < o; ++i) y(i) += magnitude;
    if (beta_star) *beta_star = beta;
    return make_dataset(X, y);
}

FitConfig basic_config(SolverKind solver, Index q, double nu = 1e-4) {
    FitConfig c;
    c.solver = solver;
    c.q_gamma = q;
    c.nu = nu;
    return c;
}

} // namespace

TEST_CASE("iq step: identity design with no outlier budget") {
    const Dataset data = make_dataset(MatrixXd::Identity(2, 2),
                                      (VectorXd(2) << 1, 2).finished());
    auto [beta_next, gamma, tie] =
        iq_bcd_regression_step(data, VectorXd::Zero(2), 0, 0.0);
    CHECK(gamma.norm() == 0.0);
    CHECK(beta_next(0) == doctest::Approx(1.0));
    CHECK(beta_next(1) == doctest::Approx(2.0));
    CHECK_FALSE(tie.tied);
}

TEST_CASE("iq step isolates an obvious outlier and matches the trimmed oracle") {
    VectorXd y(6);
    y << 0, 0, 0, 0, 0, 10;
    const Dataset data = make_dataset(MatrixXd::Ones(6, 1), y);
    auto [beta_next, gamma, tie] =
        iq_bcd_regression_step(data, VectorXd::Zero(1), 1, 0.0);
    CHECK(gamma(5) == doctest::Approx(10.0));
    CHECK(gamma.head(5).norm() == 0.0);
    CHECK(beta_next(0) == doctest::Approx(0.0));

    const auto trimmed = oracle::trimmed_min_exhaustive(data, LossModel::quadratic(), 1);
    CHECK(trimmed.beta(0) == doctest::Approx(0.0));
    REQUIRE(trimmed.optimal_supports.size() == 1);
    CHECK(trimmed.optimal_supports.front() == std::vector<Index>{5});
    // feeding the converged pair back reproduces it
    auto [b2, g2, tie2] = iq_bcd_regression_step(data, beta_next, 1, 0.0);
    CHECK((g2 - gamma).norm() <= 1e-12);
    CHECK((b2 - beta_next).norm() <= 1e-12);
}

TEST_CASE("gamma line form reproduces the composed update sequence") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Dataset data = shifted_instance(14, 3, 2, 8.0, 100 + seed);
        const DesignFactorization fac(data.X);
        const Index q = 3;
        const double nu = 0.1;

        VectorXd gamma_line = quantile_threshold(data.y, {q, nu}).first;
        VectorXd beta = fac.solve(data.y - gamma_line); // beta after gamma^(1)
        for (int t = 0; t < 25; ++t) {
            gamma_line = iq_line_step(fac, data.y, gamma_line, q, nu);
            auto [beta_next, gamma_comp, tie] =
                iq_bcd_regression_step(data, beta, q, nu);
            REQUIRE((gamma_comp - gamma_line).lpNorm<Eigen::Infinity>() <= 1e-10);
            beta = beta_next;
        }
    }
}

TEST_CASE("mm joint step: fixed point is reproduced and descent holds") {
    const Dataset data = shifted_instance(20, 3, 2, 9.0, 7);
    const double rho = 1.01 * augmented_spectral_norm_sq(data.X);
    const Index q = 3;
    const double nu = 1e-4;

    VectorXd beta = VectorXd::Zero(3), gamma = VectorXd::Zero(20);
    FitConfig cfg = basic_config(SolverKind::mm_joint_regression, q, nu);
    double prev = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 3000; ++t) {
        auto [b2, g2] = mm_joint_regression_step(data, beta, gamma, rho, q, nu);
        const double f = fit_objective(data, LossModel::quadratic(), cfg, b2, g2);
        CHECK(f <= prev + 1e-10);
        prev = f;
        beta = b2;
        gamma = g2;
    }
    auto [bf, gf] = mm_joint_regression_step(data, beta, gamma, rho, q, nu);
    CHECK((bf - beta).lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK((gf - gamma).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("mm joint step equals a hand-rolled dense recomputation") {
    const Dataset data = shifted_instance(10, 3, 1, 6.0, 21);
    const double rho = 30.0;
    const Index q = 2;
    const double nu = 0.3;
    const VectorXd beta = random_vector(3, 1);
    const VectorXd gamma = random_vector(10, 2);

    auto [b2, g2] = mm_joint_regression_step(data, beta, gamma, rho, q, nu);

    // independent dense arithmetic
    const VectorXd r = data.X * beta + gamma - data.y;
    const VectorXd b_expect = beta - data.X.transpose() * r / rho;
    VectorXd arg = gamma - r / rho;
    // manual top-q selection with the declared scaling
    std::vector<Index> order(10);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (std::abs(arg(a)) != std::abs(arg(b))) return std::abs(arg(a)) > std::abs(arg(b));
        return a < b;
    });
    VectorXd g_expect = VectorXd::Zero(10);
    for (Index k = 0; k < q; ++k)
        g_expect(order[k]) = arg(order[k]) / (1.0 + nu / rho);

    CHECK((b2 - b_expect).lpNorm<Eigen::Infinity>() <= 1e-14);
    CHECK((g2 - g_expect).lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("iq and mm joint agree on a well-separated instance") {
    const Dataset data = shifted_instance(16, 2, 2, 12.0, 31);
    FitConfig iq = basic_config(SolverKind::iq_bcd_regression, 2);
    FitConfig mm = basic_config(SolverKind::mm_joint_regression, 2);
    mm.max_iters = 20000;
    const Estimate e1 = fit_piq(data, LossModel::quadratic(), iq);
    const Estimate e2 = fit_piq(data, LossModel::quadratic(), mm);
    CHECK(e1.converged);
    CHECK(e2.converged);
    CHECK(e1.support_gamma == e2.support_gamma);
}

TEST_CASE("bcd step with no outlier budget reduces to a plain fit") {
    Rng rng(5);
    MatrixXd X = random_matrix(12, 1, 55);
    VectorXd y(12);
    for (Index i = 0; i < 12; ++i) y(i) = rng.bernoulli(0.7) ? 1.0 : 0.0;
    const Dataset data = make_dataset(X, y);
    auto [beta, gamma, tie] = bcd_general_step(data, LossModel::logistic(),
                                               VectorXd::Zero(1), 0, 0.0, {});
    CHECK(gamma.norm() == 0.0);
    // Newton landed on the MLE: score equation near zero
    const VectorXd g = loss_gradient(LossModel::logistic(), X * beta, y);
    CHECK((X.transpose() * g).lpNorm<Eigen::Infinity>() <= 1e-7);
}

TEST_CASE("bcd support selection at nu = 0 sorts the quadratic losses") {
    const Dataset data = shifted_instance(15, 2, 3, 7.0, 77);
    const VectorXd beta = random_vector(2, 3);
    auto [beta_next, gamma, tie] =
        bcd_general_step(data, LossModel::quadratic(), beta, 4, 0.0, {});
    const VectorXd resid = data.y - data.X * beta;
    std::vector<Index> order(15);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (std::abs(resid(a)) != std::abs(resid(b)))
            return std::abs(resid(a)) > std::abs(resid(b));
        return a < b;
    });
    for (Index k = 0; k < 4; ++k) CHECK(gamma(order[k]) != 0.0);
}

TEST_CASE("bcd on a flipped-label instance lands on the corrupted sample") {
    // one mislabeled high-margin sample out of eight
    MatrixXd X = MatrixXd::Ones(8, 1);
    VectorXd y = VectorXd::Ones(8);
    y(3) = 0.0; // flipped
    const Dataset data = make_dataset(X, y);
    FitConfig cfg = basic_config(SolverKind::bcd_general, 1, 1e-4);
    const Estimate est = fit_piq(data, LossModel::logistic(), cfg);
    REQUIRE(est.support_gamma.size() == 1);
    CHECK(est.support_gamma.front() == 3);

    const auto joint = oracle::joint_min_exhaustive(data, LossModel::logistic(), 1);
    CHECK(joint.support == std::vector<Index>{3});
}

TEST_CASE("mm general with a trivial rule is one gradient step") {
    const Dataset data = shifted_instance(9, 2, 0, 0.0, 91);
    const VectorXd beta = random_vector(2, 4);
    const VectorXd gamma = VectorXd::Zero(9);
    const double varrho = 4.0;
    auto [b2, g2] = mm_general_step(data, LossModel::quadratic(), beta, gamma, varrho,
                                    ThresholdRule::soft(0.0), 9, 0.0);
    const VectorXd g = data.X * beta + gamma - data.y;
    const VectorXd b_expect = beta - data.X.transpose() * g / (varrho * varrho);
    const VectorXd g_expect = gamma - g / (varrho * varrho);
    CHECK((b2 - b_expect).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((g2 - g_expect).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("mm general satisfies the surrogate descent rate bound") {
    Rng rng(8);
    MatrixXd X = random_matrix(20, 4, 321);
    VectorXd y(20);
    for (Index i = 0; i < 20; ++i) y(i) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    const Dataset data = make_dataset(X, y);
    const LossModel loss = LossModel::logistic();
    const double L = loss.lipschitz();
    const double rho = 1.01 * L * augmented_spectral_norm_sq(X);
    const double varrho = std::sqrt(rho);
    const Index q = 4;
    const double nu = 1e-3;

    FitConfig cfg = basic_config(SolverKind::mm_general, q, nu);
    VectorXd beta = VectorXd::Zero(4), gamma = VectorXd::Zero(20);
    const double f0 = fit_objective(data, loss, cfg, beta, gamma, varrho);
    double cumulative = 0.0;
    double prev = f0;
    for (int t = 0; t < 400; ++t) {
        auto [b2, g2] = mm_general_step(data, loss, beta, gamma, varrho,
                                        ThresholdRule::soft(0.0), q, nu);
        const VectorXd db = b2 - beta, dg = g2 - gamma;
        const double quantity =
            rho * (db.squaredNorm() + dg.squaredNorm()) - L * (X * db + dg).squaredNorm();
        CHECK(quantity >= -1e-10);
        cumulative += quantity;
        CHECK(cumulative <= 2.0 * f0 + 1e-8);
        const double f = fit_objective(data, loss, cfg, b2, g2, varrho);
        CHECK(f <= prev + 1e-10);
        prev = f;
        beta = b2;
        gamma = g2;
    }
}

TEST_CASE("fit on clean data stays close to the full least squares solution") {
    Rng rng(12);
    MatrixXd X = random_matrix(200, 5, 1234);
    VectorXd beta_star = random_vector(5, 4321);
    VectorXd y = X * beta_star;
    for (Index i = 0; i < 200; ++i) y(i) += rng.normal();
    const Dataset data = make_dataset(X, y);

    FitConfig cfg = basic_config(SolverKind::iq_bcd_regression, 2);
    const Estimate est = fit_piq(data, LossModel::quadratic(), cfg);
    const VectorXd ols = pseudo_inverse_apply(X, y);
    // within 3 sigma / sqrt(n) of OLS componentwise
    const double tol = 3.0 / std::sqrt(200.0);
    CHECK((est.beta - ols).lpNorm<Eigen::Infinity>() <= tol);
    CHECK(est.gamma.cwiseAbs().maxCoeff() <= 4.0); // max noise order
}

TEST_CASE("fit objective is monotone after the schedule stabilizes") {
    for (SolverKind solver : {SolverKind::iq_bcd_regression,
                              SolverKind::mm_joint_regression, SolverKind::bcd_general}) {
        const Dataset data = shifted_instance(40, 4, 5, 10.0, 60);
        FitConfig cfg = basic_config(solver, 8);
        cfg.gamma_schedule = CoolingSchedule::make(CoolingKind::quadratic, 20, 8, 25);
        std::vector<double> trace;
        const Estimate est = fit_piq(data, LossModel::quadratic(), cfg,
                                     [&](Index, const VectorXd&, const VectorXd&,
                                         double f) { trace.push_back(f); });
        REQUIRE(trace.size() >= 26);
        for (std::size_t t = 25; t + 1 < trace.size(); ++t)
            CHECK(trace[t + 1] <= trace[t] + 1e-10);
        CHECK(est.converged);
    }
}

TEST_CASE("cardinality budgets hold at every iteration") {
    const Dataset data = shifted_instance(30, 3, 4, 8.0, 44);
    FitConfig cfg = basic_config(SolverKind::iq_bcd_regression, 5);
    cfg.gamma_schedule = CoolingSchedule::make(CoolingKind::quadratic, 30, 5, 20);
    const CoolingSchedule gs = *cfg.gamma_schedule;
    fit_piq(data, LossModel::quadratic(), cfg,
            [&](Index t, const VectorXd&, const VectorXd& gamma, double) {
                Index nnz = 0;
                for (Index i = 0; i < gamma.size(); ++i)
                    if (gamma(i) != 0.0) ++nnz;
                CHECK(nnz <= gs.q_at(t));
            });
}

TEST_CASE("doubly constrained bcd keeps both supports within budget") {
    VectorXd beta_star;
    const Dataset data = shifted_instance(60, 12, 5, 12.0, 70, &beta_star);
    FitConfig cfg = basic_config(SolverKind::bcd_general, 8);
    cfg.q_beta = 4;
    cfg.beta_schedule = CoolingSchedule::make(CoolingKind::quadratic, 12, 4, 15);
    cfg.gamma_schedule = CoolingSchedule::make(CoolingKind::quadratic, 30, 8, 15);
    const Estimate est = fit_piq(data, LossModel::quadratic(), cfg);
    CHECK(static_cast<Index>(est.support_beta.size()) <= 4);
    CHECK(static_cast<Index>(est.support_gamma.size()) <= 8);
}

TEST_CASE("fixed-point residual: converged fits and on-support perturbations") {
    const Dataset data = shifted_instance(25, 3, 3, 9.0, 81);
    FitConfig cfg = basic_config(SolverKind::iq_bcd_regression, 4);
    const Estimate est = fit_piq(data, LossModel::quadratic(), cfg);
    REQUIRE(est.converged);
    CHECK(est.fixed_point_residual < 1e-6);

    Estimate perturbed = est;
    REQUIRE(!perturbed.support_gamma.empty());
    perturbed.gamma(perturbed.support_gamma.front()) += 0.1;
    const double r =
        verify_fixed_point(data, LossModel::quadratic(), perturbed, est.rho_used);
    CHECK(r >= 0.1 / (1.0 + cfg.nu) - 1e-8);
}

TEST_CASE("backtracking stepsize stays within twice the exact threshold") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Dataset data = shifted_instance(15, 3, 2, 6.0, 500 + seed);
        BacktrackState state;
        state.solver = SolverKind::mm_joint_regression;
        state.beta = random_vector(3, 600 + seed);
        state.gamma = VectorXd::Zero(15);
        state.q = 3;
        state.nu = 1e-4;
        const double rho = backtracking_stepsize(LossModel::quadratic(), data, state, 0.5);
        CHECK(rho <= 2.0 * augmented_spectral_norm_sq(data.X));
        CHECK(state.warm == rho);

        // a valid warm start is returned unchanged
        BacktrackState warm = state;
        warm.warm = 2.0 * augmented_spectral_norm_sq(data.X);
        const double rho2 =
            backtracking_stepsize(LossModel::quadratic(), data, warm, 0.5);
        CHECK(rho2 == warm.warm);
    }
}

TEST_CASE("backtracking keeps the mm objective monotone on a logistic instance") {
    Rng rng(13);
    MatrixXd X = random_matrix(25, 3, 777);
    VectorXd y(25);
    for (Index i = 0; i < 25; ++i) y(i) = rng.bernoulli(0.4) ? 1.0 : 0.0;
    const Dataset data = make_dataset(X, y);
    FitConfig cfg = basic_config(SolverKind::mm_general, 3, 1e-3);
    cfg.rho.kind = StepSizeKind::backtracking;
    cfg.rho.shrink = 0.5;
    std::vector<double> trace;
    fit_piq(data, LossModel::logistic(), cfg,
            [&](Index, const VectorXd&, const VectorXd&, double f) {
                trace.push_back(f);
            });
    for (std::size_t t = 0; t + 1 < trace.size(); ++t)
        CHECK(trace[t + 1] <= trace[t] + 1e-10);
}

TEST_CASE("config guards") {
    const Dataset data = shifted_instance(10, 2, 1, 5.0, 1);
    FitConfig cfg = basic_config(SolverKind::iq_bcd_regression, 6); // q > n/2
    CHECK_THROWS_AS((void)fit_piq(data, LossModel::quadratic(), cfg), Error);

    FitConfig bad_loss = basic_config(SolverKind::iq_bcd_regression, 2);
    CHECK_THROWS_AS((void)fit_piq(data, LossModel::logistic(), bad_loss), Error);

    FitConfig bad_rho = basic_config(SolverKind::mm_joint_regression, 2);
    bad_rho.rho = {StepSizeKind::fixed, -1.0, 0.5};
    CHECK_THROWS_AS((void)fit_piq(data, LossModel::quadratic(), bad_rho), Error);

    CHECK_THROWS_AS((void)mm_joint_regression_step(data, VectorXd::Zero(2),
                                                   VectorXd::Zero(10), 0.0, 1, 0.0),
                    Error);
    CHECK_THROWS_AS((void)mm_general_step(data, LossModel::quadratic(),
                                          VectorXd::Zero(2), VectorXd::Zero(10), -2.0,
                                          ThresholdRule::soft(0.0), 1, 0.0),
                    Error);
}

TEST_CASE("non-convergence is reported, not thrown") {
    const Dataset data = shifted_instance(12, 2, 2, 7.0, 2);
    FitConfig cfg = basic_config(SolverKind::mm_joint_regression, 2);
    cfg.max_iters = 1;
    const Estimate est = fit_piq(data, LossModel::quadratic(), cfg);
    CHECK_FALSE(est.converged);
    CHECK(est.iterations >= 1);
}

TEST_CASE("tie events are counted and the run proceeds deterministically") {
    // integer data with exact magnitude ties
    MatrixXd X = MatrixXd::Ones(6, 1);
    VectorXd y(6);
    y << 4, -4, 1, 1, 0, 0;
    const Dataset data = make_dataset(X, y);
    FitConfig cfg = basic_config(SolverKind::iq_bcd_regression, 1, 0.0);
    cfg.max_iters = 4;
    const Estimate est = fit_piq(data, LossModel::quadratic(), cfg);
    CHECK(est.tie_events >= 1);
    const Estimate again = fit_piq(data, LossModel::quadratic(), cfg);
    CHECK((est.gamma - again.gamma).norm() == 0.0);
}
