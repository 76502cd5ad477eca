#include "piq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "piq/thresholding.hpp"

namespace piq {

DesignFactorization::DesignFactorization(const MatrixXd& X)
    : svd_(X, Eigen::ComputeThinU | Eigen::ComputeThinV), rows_(X.rows()) {
    require(X.allFinite(), ErrorKind::data, "design factorization: non-finite entries");
    const auto& sv = svd_.singularValues();
    sigma_max_ = sv.size() ? sv(0) : 0.0;
    const double tol = sigma_max_ * static_cast<double>(std::max(X.rows(), X.cols())) *
                       std::numeric_limits<double>::epsilon();
    rank_ = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol) ++rank_;
}

VectorXd DesignFactorization::solve(const Eigen::Ref<const VectorXd>& v) const {
    require(v.size() == rows_, ErrorKind::dimension,
            "pseudo-inverse apply: vector length does not match rows of X");
    require(v.allFinite(), ErrorKind::data, "pseudo-inverse apply: non-finite entries");
    const auto& sv = svd_.singularValues();
    VectorXd coeff = svd_.matrixU().leftCols(rank_).transpose() * v;
    for (Index i = 0; i < rank_; ++i) coeff(i) /= sv(i);
    return svd_.matrixV().leftCols(rank_) * coeff;
}

VectorXd DesignFactorization::apply_hat(const Eigen::Ref<const VectorXd>& v) const {
    require(v.size() == rows_, ErrorKind::dimension, "hat apply: length mismatch");
    const auto U1 = svd_.matrixU().leftCols(rank_);
    return U1 * (U1.transpose() * v);
}

VectorXd DesignFactorization::apply_residual_projector(
    const Eigen::Ref<const VectorXd>& v) const {
    return v - apply_hat(v);
}

MatrixXd DesignFactorization::dense_hat() const {
    require(rows_ <= 4096, ErrorKind::budget,
            "dense hat matrix limited to n <= 4096; use the factored application");
    const auto U1 = svd_.matrixU().leftCols(rank_);
    return U1 * U1.transpose();
}

VectorXd pseudo_inverse_apply(const MatrixXd& X, const Eigen::Ref<const VectorXd>& v) {
    return DesignFactorization(X).solve(v);
}

HatMatrix hat_matrix(const MatrixXd& X) {
    DesignFactorization fac(X);
    return {fac.dense_hat(), fac.rank()};
}

double spectral_norm_sq(const MatrixXd& X) {
    // Eigen-solve the smaller Gram matrix.
    if (X.rows() == 0 || X.cols() == 0) return 0.0;
    MatrixXd gram;
    if (X.cols() <= X.rows())
        gram = X.transpose() * X;
    else
        gram = X * X.transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    const double lam = es.eigenvalues().maxCoeff();
    return lam > 0.0 ? lam : 0.0;
}

double augmented_spectral_norm_sq(const MatrixXd& X) {
    // [X, I] [X, I]' = X X' + I, so the squared norms differ by exactly one.
    return spectral_norm_sq(X) + 1.0;
}

std::uint64_t binomial(Index n, Index k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    const std::uint64_t cap = std::numeric_limits<std::int64_t>::max();
    std::uint64_t r = 1;
    for (Index i = 1; i <= k; ++i) {
        const double est = static_cast<double>(r) *
                           static_cast<double>(n - k + i) / static_cast<double>(i);
        if (est > static_cast<double>(cap)) return cap;
        r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return r;
}

bool for_each_subset(Index n, Index k,
                     const std::function<bool(const std::vector<Index>&)>& visit) {
    if (k < 0 || k > n) return true;
    std::vector<Index> comb(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = i;
    if (k == 0) return visit(comb);
    for (;;) {
        if (!visit(comb)) return false;
        // advance
        Index i = k - 1;
        while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) return true;
        ++comb[static_cast<std::size_t>(i)];
        for (Index j = i + 1; j < k; ++j)
            comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
}

RestrictedNorm restricted_sup_norm(const MatrixXd& X, Index s, Index o,
                                   std::uint64_t max_enumerations) {
    const Index n = X.rows(), p = X.cols();
    require(s >= 0 && s <= p && o >= 0 && o <= n, ErrorKind::usage,
            "restricted_sup_norm: require 0 <= s <= p and 0 <= o <= n");
    const std::uint64_t cs = binomial(p, s), co = binomial(n, o);
    require(co != 0 && cs <= max_enumerations / co, ErrorKind::budget,
            "restricted_sup_norm: enumeration budget exceeded; fall back to "
            "restricted_sup_norm_bound");

    // For a fixed support pair the maximum Rayleigh quotient is the largest
    // eigenvalue of the Gram of the thin design [X_S, I_O].
    double best = 0.0;
    for_each_subset(p, s, [&](const std::vector<Index>& cols) {
        MatrixXd Xs(n, s);
        for (Index j = 0; j < s; ++j) Xs.col(j) = X.col(cols[static_cast<std::size_t>(j)]);
        for_each_subset(n, o, [&](const std::vector<Index>& rows) {
            const Index m = s + o;
            if (m == 0) return true;
            MatrixXd G(m, m);
            G.topLeftCorner(s, s) = Xs.transpose() * Xs;
            for (Index a = 0; a < o; ++a) {
                const Index i = rows[static_cast<std::size_t>(a)];
                for (Index j = 0; j < s; ++j) {
                    G(s + a, j) = Xs(i, j);
                    G(j, s + a) = Xs(i, j);
                }
                for (Index b = 0; b < o; ++b) G(s + a, s + b) = (a == b) ? 1.0 : 0.0;
            }
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(G, Eigen::EigenvaluesOnly);
            best = std::max(best, es.eigenvalues().maxCoeff());
            return true;
        });
        return true;
    });
    return {best, true};
}

RestrictedNorm restricted_sup_norm_bound(const MatrixXd& X) {
    return {augmented_spectral_norm_sq(X), false};
}

double truncated_power_estimate(const MatrixXd& X, Index s, int iters, VectorXd* warm) {
    const Index p = X.cols();
    s = std::clamp<Index>(s, 1, p);
    VectorXd v;
    if (warm && warm->size() == p && warm->squaredNorm() > 0.0) {
        v = *warm;
    } else {
        // deterministic spread start
        v = VectorXd::Ones(p);
        for (Index j = 0; j < p; j += 2) v(j) = -1.0;
    }
    std::vector<Index> buffer;
    double lambda = 0.0;
    for (int k = 0; k < iters; ++k) {
        quantile_threshold_inplace(v, s, 0.0, buffer);
        const double nv = v.norm();
        if (nv == 0.0) return 0.0;
        v /= nv;
        lambda = (X * v).squaredNorm();
        v = X.transpose() * (X * v);
    }
    quantile_threshold_inplace(v, s, 0.0, buffer);
    const double nv = v.norm();
    if (nv > 0.0) {
        v /= nv;
        lambda = std::max(lambda, (X * v).squaredNorm());
    }
    if (warm) *warm = v;
    return lambda;
}

std::pair<VectorXd, VectorXd> standardize_columns(MatrixXd& X) {
    const Index n = X.rows(), p = X.cols();
    VectorXd means(p), sds(p);
    for (Index j = 0; j < p; ++j) {
        means(j) = X.col(j).mean();
        X.col(j).array() -= means(j);
        const double ss = X.col(j).squaredNorm();
        const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
        sds(j) = sd;
        if (sd > 0.0) X.col(j) /= sd;
    }
    return {means, sds};
}

} // namespace piq
