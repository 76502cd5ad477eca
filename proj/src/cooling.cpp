#include "piq/cooling.hpp"

#include <algorithm>
#include <cmath>

namespace piq {

CoolingSchedule CoolingSchedule::make(CoolingKind kind, Index upper, Index lower,
                                      Index horizon) {
    require(lower >= 0 && upper >= lower, ErrorKind::usage,
            "cooling schedule: need 0 <= lower <= upper");
    require(horizon >= 1, ErrorKind::usage, "cooling schedule: horizon must be >= 1");
    return {kind, upper, lower, horizon};
}

Index CoolingSchedule::q_at(Index t) const {
    require(t >= 1, ErrorKind::usage, "cooling schedule: t starts at 1");
    if (kind == CoolingKind::constant || t >= horizon || upper == lower) return lower;

    const double U = static_cast<double>(upper);
    const double L = static_cast<double>(lower);
    const double T = static_cast<double>(horizon);
    const double td = static_cast<double>(t);
    double q = L;
    switch (kind) {
    case CoolingKind::quadratic: {
        const double a = (U - L) / (T * T);
        q = U - a * td * td;
        break;
    }
    case CoolingKind::logarithmic: {
        const double a = (U - L) / std::log(T);
        q = U - a * std::log(td);
        break;
    }
    case CoolingKind::sigmoidal: {
        // a solved in closed form so that 2U/(1+e^{aT}) hits the target at T
        // (the clamp absorbs the lower==0 corner).
        const double denom_target = L > 0.5 ? 2.0 * U / L - 1.0 : 4.0 * U;
        const double a = std::log(std::max(denom_target, 1.0 + 1e-12)) / T;
        q = 2.0 * U / (1.0 + std::exp(a * td));
        break;
    }
    case CoolingKind::constant:
        break;
    }
    const Index rounded = static_cast<Index>(std::llround(q));
    return std::clamp(rounded, lower, upper);
}

std::string CoolingSchedule::name() const {
    switch (kind) {
    case CoolingKind::constant: return "const";
    case CoolingKind::quadratic: return "quad";
    case CoolingKind::sigmoidal: return "sig";
    case CoolingKind::logarithmic: return "log";
    }
    return "?";
}

CoolingKind parse_cooling(const std::string& text) {
    if (text == "const" || text == "constant") return CoolingKind::constant;
    if (text == "quad" || text == "quadratic") return CoolingKind::quadratic;
    if (text == "sig" || text == "sigmoidal") return CoolingKind::sigmoidal;
    if (text == "log" || text == "logarithmic") return CoolingKind::logarithmic;
    throw_error(ErrorKind::usage, "unknown cooling schedule '" + text +
                                      "'; expected const|quad|sig|log");
}

} // namespace piq
