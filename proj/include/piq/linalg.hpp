#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "piq/dataset.hpp"
#include "piq/error.hpp"

namespace piq {

/// Rank-revealing SVD of X, shared by the min-norm least-squares solve and the
/// factored hat-matrix application. Rank cutoff: sigma_max * max(n,p) * eps.
class DesignFactorization {
public:
    explicit DesignFactorization(const MatrixXd& X);

    /// Minimum-norm solution of min_beta ||v - X beta||_2, i.e. (X'X)^+ X' v.
    VectorXd solve(const Eigen::Ref<const VectorXd>& v) const;

    /// H v with H = X (X'X)^+ X', applied through the thin column basis.
    VectorXd apply_hat(const Eigen::Ref<const VectorXd>& v) const;

    /// (I - H) v.
    VectorXd apply_residual_projector(const Eigen::Ref<const VectorXd>& v) const;

    Index rank() const { return rank_; }
    Index rows() const { return rows_; }
    double largest_singular_value() const { return sigma_max_; }

    /// Dense H; guarded to n <= 4096 (O(n^2) memory).
    MatrixXd dense_hat() const;

private:
    Eigen::BDCSVD<MatrixXd> svd_;
    Index rank_ = 0;
    Index rows_ = 0;
    double sigma_max_ = 0.0;
};

/// (X'X)^+ X' v via a fresh factorization; use DesignFactorization when the
/// same X is reused across iterations.
VectorXd pseudo_inverse_apply(const MatrixXd& X, const Eigen::Ref<const VectorXd>& v);

struct HatMatrix {
    MatrixXd H;
    Index rank = 0;
};

/// Dense hat matrix X (X'X)^+ X' with its rank. n <= 4096 only.
HatMatrix hat_matrix(const MatrixXd& X);

/// Squared spectral norm ||X||_2^2 (largest eigenvalue of the smaller Gram).
double spectral_norm_sq(const MatrixXd& X);

/// ||[X, I]||_2^2 = ||X||_2^2 + 1 exactly.
double augmented_spectral_norm_sq(const MatrixXd& X);

struct RestrictedNorm {
    double value = 0.0;
    bool exact = false; // true: exhaustive maximum; false: global upper bound
};

/// Restricted operator-norm constant of the augmented design [X, I]:
/// max ||X beta + gamma||^2 / (||beta||^2 + ||gamma||^2) over supports
/// |J(beta)| <= s, |J(gamma)| <= o. Exhaustive (test/oracle scale); the
/// enumeration budget C(p,s)*C(n,o) must not exceed max_enumerations.
RestrictedNorm restricted_sup_norm(const MatrixXd& X, Index s, Index o,
                                   std::uint64_t max_enumerations = 1000000);

/// Cheap production bound ||[X, I]||_2^2, flagged inexact.
RestrictedNorm restricted_sup_norm_bound(const MatrixXd& X);

/// Lower estimate of the restricted norm M_X(s) = max ||X v||^2 / ||v||^2 over
/// s-sparse v, by truncated power iteration (sparsify, normalize, repeat).
/// `warm` carries the iterate across calls when the budget s drifts.
double truncated_power_estimate(const MatrixXd& X, Index s, int iters = 20,
                                VectorXd* warm = nullptr);

/// Visits all size-k subsets of {0..n-1} in lexicographic order.
/// Returns false (stops early) if the visitor returns false.
bool for_each_subset(Index n, Index k,
                     const std::function<bool(const std::vector<Index>&)>& visit);

/// C(n, k) saturating at 2^63-1.
std::uint64_t binomial(Index n, Index k);

} // namespace piq
