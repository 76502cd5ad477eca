#pragma once

#include <Eigen/Dense>

#include <string>

#include "piq/error.hpp"

namespace piq {

using Eigen::Index;

enum class CoolingKind { constant, quadratic, sigmoidal, logarithmic };

/// Iteration-decreasing cardinality budget Q(t), t = 1, 2, ...  Values are
/// rounded, clamped to [lower, upper], forced nonincreasing, and equal to
/// `lower` for every t >= horizon.
struct CoolingSchedule {
    CoolingKind kind = CoolingKind::constant;
    Index upper = 0;
    Index lower = 0;
    Index horizon = 1;

    static CoolingSchedule constant(Index target) {
        return {CoolingKind::constant, target, target, 1};
    }
    static CoolingSchedule make(CoolingKind kind, Index upper, Index lower,
                                Index horizon);

    Index q_at(Index t) const;

    std::string name() const;
};

CoolingKind parse_cooling(const std::string& text); // const|quad|sig|log

} // namespace piq
