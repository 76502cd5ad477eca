#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "piq/dataset.hpp"
#include "piq/losses.hpp"

namespace piq {
namespace oracle {

/// Guard on combinatorial loops; checked before enumeration starts.
struct OracleBudget {
    std::uint64_t max_enumerations = 1000000;
};

struct TrimmedResult {
    VectorXd beta;
    VectorXd gamma; // finite stand-ins on the deleted set
    double value = 0.0;
    std::vector<std::vector<Index>> optimal_supports; // all within tie tolerance
    std::uint64_t enumerated = 0;
};

/// Certified global optimum of the trimmed problem: enumerate every size-q
/// deletion set, fit the kept samples exactly (closed-form LS for the
/// quadratic loss, damped Newton otherwise), keep the minimum. Deleted-sample
/// gamma entries are set to the finite regularized univariate minimizers.
TrimmedResult trimmed_min_exhaustive(const Dataset& data, const LossModel& loss, Index q,
                                     const OracleBudget& budget = {},
                                     double tie_tol = 1e-9);

/// Trimmed objective at a fixed beta: sum of the n-q smallest sample losses.
double trimmed_objective(const Dataset& data, const LossModel& loss,
                         const Eigen::Ref<const VectorXd>& beta, Index q);

/// Winsorized objective at a fixed beta: sum of tau-capped sample losses.
double winsorized_objective(const Dataset& data, const LossModel& loss,
                            const Eigen::Ref<const VectorXd>& beta, double tau);

/// inf over ||gamma||_0 <= q of the full loss at fixed beta, evaluated by
/// support enumeration with univariate on-support minimization (the
/// independent route for the order-statistics identity).
double sparse_shift_min_at_beta(const Dataset& data, const LossModel& loss,
                                const Eigen::Ref<const VectorXd>& beta, Index q,
                                const OracleBudget& budget = {});

struct JointResult {
    VectorXd beta;
    VectorXd gamma;
    double value = 0.0; // full loss at (beta, gamma), finite stand-ins included
    std::vector<Index> support;
    std::uint64_t enumerated = 0;
};

/// Brute-force minimum of the cardinality-constrained joint problem over all
/// gamma supports; the route kept independent of the trimmed enumeration by
/// evaluating the full loss at explicit finite gamma values.
JointResult joint_min_exhaustive(const Dataset& data, const LossModel& loss, Index q,
                                 const OracleBudget& budget = {});

struct WinsorizedResult {
    VectorXd beta;
    double value = 0.0;
    bool degenerate = false; // tau = 0: objective identically zero
};

/// Grid-certified minimum of the winsorized problem for p <= 2, with
/// coordinate-wise golden-section polish inside the winning cell.
WinsorizedResult winsorized_min_exhaustive(const Dataset& data, const LossModel& loss,
                                           double tau, const OracleBudget& budget = {},
                                           double half_width = 10.0, Index grid = 201);

struct RipReport {
    double epsilon = 0.0;  // 1 - max restricted eigenvalue of H
    double kappa = 0.0;    // contraction parameter at (vartheta, nu)
    Index support_size = 0;
    bool satisfied = false; // epsilon + (1 - 1/sqrt(vartheta)) nu > 1/sqrt(vartheta)
    double vartheta = 0.0;
    double nu = 0.0;
};

/// Exact restricted-isometry margin of the hat matrix by exhaustive principal
/// submatrix eigen-solves over all supports of the given size.
RipReport rip_margin(const MatrixXd& X, Index support_size, double vartheta = 4.0,
                     double nu = 0.0, const OracleBudget& budget = {});

} // namespace oracle
} // namespace piq
