#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "piq/error.hpp"

namespace piq {

using Eigen::Index;
using Eigen::VectorXd;

/// Parameters of the quantile thresholding operator: cardinality budget q and
/// ridge shrinkage nu applied to the surviving entries as division by (1+nu).
struct QuantileThresholdParams {
    Index q = 0;
    double nu = 0.0;
};

/// Flags a violation of the uniqueness assumption: the q-th and (q+1)-th
/// largest magnitudes coincide and are nonzero, so the kept support is not
/// determined by magnitudes alone.
struct TieReport {
    bool tied = false;
    double boundary_magnitude = 0.0;
};

/// Keeps the q largest-magnitude entries of s scaled by 1/(1+nu), zeroes the
/// rest. Exact ties at the selection boundary keep the smallest index and are
/// reported. Expected O(n) via partial selection.
std::pair<VectorXd, TieReport> quantile_threshold(const Eigen::Ref<const VectorXd>& s,
                                                  const QuantileThresholdParams& params);

/// In-place variant reusing the caller's index buffer (inner-loop hot path).
TieReport quantile_threshold_inplace(VectorXd& s, Index q, double nu,
                                     std::vector<Index>& index_buffer);

enum class ThresholdKind { soft, hard, quantile };

/// A componentwise thresholding rule: soft/hard with scalar threshold lambda,
/// or the quantile operator with its own parameters.
struct ThresholdRule {
    ThresholdKind kind = ThresholdKind::soft;
    double lambda = 0.0;
    QuantileThresholdParams quantile;

    static ThresholdRule soft(double lambda) { return {ThresholdKind::soft, lambda, {}}; }
    static ThresholdRule hard(double lambda) { return {ThresholdKind::hard, lambda, {}}; }
    static ThresholdRule quantile_rule(Index q, double nu) {
        return {ThresholdKind::quantile, 0.0, {q, nu}};
    }
};

double soft_threshold(double t, double lambda);
double hard_threshold(double t, double lambda);

VectorXd apply_threshold(const ThresholdRule& rule, const Eigen::Ref<const VectorXd>& v);

/// Penalty induced by a soft or hard rule at scalar theta: lambda*|theta| for
/// soft, the capped quadratic for hard. The quantile rule's penalty is the
/// cardinality constraint and is not representable here.
double induced_penalty(const ThresholdRule& rule, double theta);

} // namespace piq
