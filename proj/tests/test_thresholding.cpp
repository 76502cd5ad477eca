#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "piq/thresholding.hpp"
#include "test_support.hpp"

using namespace piq;
using piq::testing::random_vector;
using piq::testing::shrinkage_objective;
using piq::testing::shrinkage_oracle_min;

TEST_CASE("keeps the largest magnitude entry without scaling at nu = 0") {
    VectorXd s(3);
    s << 3, -1, 2;
    auto [out, tie] = quantile_threshold(s, {1, 0.0});
    CHECK(out(0) == 3.0);
    CHECK(out(1) == 0.0);
    CHECK(out(2) == 0.0);
    CHECK_FALSE(tie.tied);
}

TEST_CASE("scales survivors by 1/(1+nu) and matches the exhaustive minimum") {
    VectorXd s(3);
    s << 3, -1, 2;
    auto [out, tie] = quantile_threshold(s, {2, 1.0});
    CHECK(out(0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(out(1) == 0.0);
    CHECK(out(2) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_FALSE(tie.tied);
    const double gap =
        shrinkage_objective(s, out, 1.0) - shrinkage_oracle_min(s, 2, 1.0);
    CHECK(std::abs(gap) <= 1e-12);
}

TEST_CASE("exact tie keeps the smallest index and is reported") {
    VectorXd s(3);
    s << 2, -2, 1;
    auto [out, tie] = quantile_threshold(s, {1, 0.0});
    CHECK(out(0) == 2.0);
    CHECK(out(1) == 0.0);
    CHECK(out(2) == 0.0);
    CHECK(tie.tied);
    CHECK(tie.boundary_magnitude == 2.0);
}

TEST_CASE("zero boundary does not count as a tie") {
    VectorXd s(4);
    s << 5, 1, 0, 0;
    auto [out, tie] = quantile_threshold(s, {3, 0.0});
    CHECK_FALSE(tie.tied);
    CHECK(out(0) == 5.0);
}

TEST_CASE("oracle equivalence over random draws") {
    int checked = 0;
    for (Index n = 1; n <= 6; ++n) {
        for (Index q = 0; q <= n; ++q) {
            for (double nu : {0.0, 0.5, 1.0}) {
                for (std::uint64_t seed = 0; seed < 25; ++seed) {
                    const VectorXd s = random_vector(n, 7000 + seed * 13 + n * 101 + q);
                    auto [out, tie] = quantile_threshold(s, {q, nu});
                    const double gap = shrinkage_objective(s, out, nu) -
                                       shrinkage_oracle_min(s, q, nu);
                    REQUIRE(std::abs(gap) <= 1e-12);
                    ++checked;
                }
            }
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("odd symmetry when there is no tie") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const VectorXd s = random_vector(7, 400 + seed);
        auto [pos, tie] = quantile_threshold(s, {3, 0.25});
        if (tie.tied) continue;
        auto [neg, tie2] = quantile_threshold(-s, {3, 0.25});
        CHECK((pos + neg).lpNorm<Eigen::Infinity>() == 0.0);
    }
}

TEST_CASE("output support never exceeds q") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const VectorXd s = random_vector(9, 900 + seed);
        for (Index q = 0; q <= 9; ++q) {
            auto [out, tie] = quantile_threshold(s, {q, 0.1});
            Index nnz = 0;
            for (Index i = 0; i < out.size(); ++i)
                if (out(i) != 0.0) ++nnz;
            CHECK(nnz <= q);
        }
    }
}

TEST_CASE("q beyond n is rejected") {
    VectorXd s(2);
    s << 1, 2;
    CHECK_THROWS_AS((void)quantile_threshold(s, {3, 0.0}), Error);
    CHECK_THROWS_AS((void)quantile_threshold(s, {1, -0.5}), Error);
}

TEST_CASE("soft and hard rules componentwise") {
    VectorXd v(2);
    v << 2, -0.5;
    const VectorXd soft = apply_threshold(ThresholdRule::soft(1.0), v);
    CHECK(soft(0) == 1.0);
    CHECK(soft(1) == 0.0);
    const VectorXd hard = apply_threshold(ThresholdRule::hard(1.0), v);
    CHECK(hard(0) == 2.0);
    CHECK(hard(1) == 0.0);

    const VectorXd id = apply_threshold(ThresholdRule::soft(0.0), random_vector(6, 3));
    CHECK((id - random_vector(6, 3)).norm() == 0.0);
}

TEST_CASE("soft and hard rules satisfy the thresholding axioms") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const double lambda = std::abs(rng.normal());
        double t = rng.normal() * 3.0;
        double tp = t + std::abs(rng.normal());
        for (ThresholdRule rule : {ThresholdRule::soft(lambda), ThresholdRule::hard(lambda)}) {
            auto theta = [&](double x) {
                return rule.kind == ThresholdKind::soft ? soft_threshold(x, lambda)
                                                        : hard_threshold(x, lambda);
            };
            CHECK(theta(-t) == -theta(t));    // odd
            CHECK(theta(t) <= theta(tp));     // monotone
            const double a = std::abs(t);
            CHECK(theta(a) >= 0.0);           // 0 <= Theta(t) <= t on t >= 0
            CHECK(theta(a) <= a);
        }
    }
}

TEST_CASE("induced penalties: closed forms") {
    CHECK(induced_penalty(ThresholdRule::soft(2.0), 3.0) == 6.0);
    CHECK(induced_penalty(ThresholdRule::hard(2.0), 3.0) == 2.0);
    CHECK(induced_penalty(ThresholdRule::hard(2.0), 1.0) == doctest::Approx(1.5));
    CHECK_THROWS_AS((void)induced_penalty(ThresholdRule::quantile_rule(1, 0.0), 1.0),
                    Error);
}

TEST_CASE("hard penalty agrees with quadrature of the integral definition") {
    // P(theta) = integral_0^|theta| (sup{s : Theta(s) <= u} - u) du, evaluated
    // numerically with the sup taken over a fine s-grid.
    const double lambda = 2.0;
    auto sup_inverse = [&](double u) {
        double sup = 0.0;
        for (double s = 0.0; s <= 10.0; s += 1e-4)
            if (hard_threshold(s, lambda) <= u) sup = s;
        return sup;
    };
    for (double theta : {1.0, 3.0}) {
        double integral = 0.0;
        const int steps = 2000;
        const double h = theta / steps;
        for (int k = 0; k < steps; ++k) {
            const double u = (k + 0.5) * h;
            integral += (sup_inverse(u) - u) * h;
        }
        CHECK(integral ==
              doctest::Approx(induced_penalty(ThresholdRule::hard(lambda), theta))
                  .epsilon(2e-3));
    }
}
