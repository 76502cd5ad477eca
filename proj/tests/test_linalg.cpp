#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "piq/linalg.hpp"
#include "test_support.hpp"

using namespace piq;
using piq::testing::random_matrix;
using piq::testing::random_vector;

TEST_CASE("identity design returns the vector itself") {
    const MatrixXd X = MatrixXd::Identity(3, 3);
    VectorXd v(3);
    v << 1, 2, 3;
    CHECK((pseudo_inverse_apply(X, v) - v).norm() == doctest::Approx(0.0));
}

TEST_CASE("constant column averages a symmetric residual") {
    MatrixXd X(2, 1);
    X << 1, 1;
    VectorXd v(2);
    v << 0, 2;
    const VectorXd beta = pseudo_inverse_apply(X, v);
    CHECK(beta.size() == 1);
    CHECK(beta(0) == doctest::Approx(1.0));
}

TEST_CASE("matches the explicit normal-equations solve on a seeded instance") {
    const MatrixXd X = random_matrix(5, 2, 7);
    const VectorXd v = random_vector(5, 17);
    const VectorXd beta = pseudo_inverse_apply(X, v);
    const MatrixXd gram = X.transpose() * X;
    const VectorXd oracle = gram.inverse() * (X.transpose() * v);
    CHECK((beta - oracle).norm() <= 1e-10 * oracle.norm());
}

TEST_CASE("minimum-norm solution on rank-deficient designs") {
    MatrixXd X(3, 2);
    X << 1, 1, 2, 2, 3, 3; // rank 1
    const VectorXd v = random_vector(3, 5);
    const VectorXd beta = pseudo_inverse_apply(X, v);
    // residual orthogonal to the column space and beta in the row space
    CHECK(std::abs(X.col(0).dot(v - X * beta)) <= 1e-10);
    CHECK(beta(0) == doctest::Approx(beta(1)).epsilon(1e-12));
}

TEST_CASE("dimension and data errors") {
    const MatrixXd X = random_matrix(4, 2, 1);
    CHECK_THROWS_AS((void)pseudo_inverse_apply(X, random_vector(3, 2)), Error);
    MatrixXd bad = X;
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS((void)pseudo_inverse_apply(bad, random_vector(4, 2)), Error);
}

TEST_CASE("hat matrix of the identity and of a constant column") {
    CHECK((hat_matrix(MatrixXd::Identity(2, 2)).H - MatrixXd::Identity(2, 2)).norm() ==
          doctest::Approx(0.0));
    MatrixXd ones(2, 1);
    ones << 1, 1;
    const HatMatrix hm = hat_matrix(ones);
    CHECK(hm.rank == 1);
    CHECK(hm.H(0, 0) == doctest::Approx(0.5));
    CHECK(hm.H(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("hat matrix is a symmetric idempotent projector with trace = rank") {
    const MatrixXd X = random_matrix(6, 3, 2024);
    const HatMatrix hm = hat_matrix(X);
    CHECK(hm.rank == 3);
    CHECK(hm.H.trace() == doctest::Approx(3.0).epsilon(1e-10));
    CHECK((hm.H * hm.H - hm.H).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((hm.H - hm.H.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::sqrt(spectral_norm_sq(hm.H)) == doctest::Approx(1.0).epsilon(1e-8));

    const DesignFactorization fac(X);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const VectorXd v = random_vector(6, 100 + s);
        const VectorXd hv = fac.apply_hat(v);
        CHECK((fac.apply_hat(hv) - hv).norm() <= 1e-8 * (1.0 + hv.norm()));
    }
}

TEST_CASE("pseudo-inverse recovers beta for full-column-rank designs") {
    const MatrixXd X = random_matrix(8, 3, 99);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const VectorXd beta = random_vector(3, 300 + s);
        const VectorXd rec = pseudo_inverse_apply(X, X * beta);
        CHECK((rec - beta).norm() <= 1e-8 * (1.0 + beta.norm()));
    }
}

TEST_CASE("restricted norm of the identity block") {
    CHECK(restricted_sup_norm(MatrixXd::Identity(2, 2), 2, 0).value ==
          doctest::Approx(1.0));
    CHECK(restricted_sup_norm(MatrixXd::Zero(3, 2), 2, 1).value == doctest::Approx(1.0));
}

TEST_CASE("restricted norm matches an independent SVD sweep on a seeded design") {
    const MatrixXd X = random_matrix(4, 3, 11);
    const RestrictedNorm rn = restricted_sup_norm(X, 1, 1);
    CHECK(rn.exact);

    double best = 0.0;
    for (Index col = 0; col < 3; ++col) {
        for (Index row = 0; row < 4; ++row) {
            MatrixXd thin(4, 2);
            thin.col(0) = X.col(col);
            thin.col(1) = VectorXd::Unit(4, row);
            Eigen::JacobiSVD<MatrixXd> svd(thin);
            const double smax = svd.singularValues()(0);
            best = std::max(best, smax * smax);
        }
    }
    CHECK(rn.value == doctest::Approx(best).epsilon(1e-10));
}

TEST_CASE("restricted norm is monotone in both budgets and below the global bound") {
    const MatrixXd X = random_matrix(5, 3, 42);
    const double bound = restricted_sup_norm_bound(X).value;
    double prev = 0.0;
    for (Index s = 0; s <= 3; ++s) {
        const double vs = restricted_sup_norm(X, s, 1).value;
        CHECK(vs >= prev - 1e-12);
        CHECK(vs <= bound + 1e-12);
        prev = vs;
    }
    prev = 0.0;
    for (Index o = 0; o <= 5; ++o) {
        const double vo = restricted_sup_norm(X, 1, o).value;
        CHECK(vo >= prev - 1e-12);
        CHECK(vo <= bound + 1e-12);
        prev = vo;
    }
}

TEST_CASE("truncated power estimate is a valid lower bound on the restricted norm") {
    const MatrixXd X = random_matrix(10, 6, 5150);
    for (Index s : {1, 2, 3}) {
        const double exact = restricted_sup_norm(X, s, 0).value;
        const double est = truncated_power_estimate(X, s, 40);
        CHECK(est > 0.0);
        CHECK(est <= exact + 1e-9);
    }
    // diagonal design: the sparse maximizer is a coordinate vector, found exactly
    MatrixXd D = MatrixXd::Zero(4, 4);
    D.diagonal() << 3, 1, 2, 0.5;
    CHECK(truncated_power_estimate(D, 1, 40) == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("exhaustive budget overflow is an explicit error") {
    const MatrixXd X = random_matrix(30, 20, 3);
    CHECK_THROWS_AS((void)restricted_sup_norm(X, 10, 15, 1000), Error);
}

TEST_CASE("augmented spectral norm identity") {
    const MatrixXd X = random_matrix(6, 4, 77);
    MatrixXd aug(6, 10);
    aug << X, MatrixXd::Identity(6, 6);
    Eigen::JacobiSVD<MatrixXd> svd(aug);
    const double direct = svd.singularValues()(0);
    CHECK(augmented_spectral_norm_sq(X) ==
          doctest::Approx(direct * direct).epsilon(1e-10));
}

TEST_CASE("augmented design applies the scaled product without materializing") {
    const MatrixXd X = random_matrix(50, 3, 21);
    const VectorXd beta = random_vector(3, 22);
    const VectorXd gamma = random_vector(50, 23);

    const AugmentedDesign plain(X);
    CHECK((plain.apply(beta, gamma) - (X * beta + gamma)).norm() <= 1e-14);

    const double rho = 4.0;
    const AugmentedDesign scaled(X, rho);
    CHECK((scaled.apply(beta, gamma) - (X * beta / 2.0 + gamma)).norm() <= 1e-14);
    CHECK_THROWS_AS(AugmentedDesign(X, 0.0), Error);
}

TEST_CASE("factored projector conserves the orthogonal split") {
    const MatrixXd X = random_matrix(7, 2, 8);
    const DesignFactorization fac(X);
    const VectorXd v = random_vector(7, 9);
    const VectorXd hv = fac.apply_hat(v);
    const VectorXd rv = fac.apply_residual_projector(v);
    CHECK((hv + rv - v).norm() <= 1e-12);
    CHECK(std::abs(hv.dot(rv)) <= 1e-10);
}
