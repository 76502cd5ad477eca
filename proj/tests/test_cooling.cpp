#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "piq/cooling.hpp"

using namespace piq;

TEST_CASE("all schedule kinds are nonincreasing, clamped and land on the target") {
    for (CoolingKind kind : {CoolingKind::constant, CoolingKind::quadratic,
                             CoolingKind::sigmoidal, CoolingKind::logarithmic}) {
        const CoolingSchedule sched = CoolingSchedule::make(kind, 500, 40, 200);
        Index prev = sched.upper;
        for (Index t = 1; t <= 300; ++t) {
            const Index q = sched.q_at(t);
            CHECK(q >= sched.lower);
            CHECK(q <= sched.upper);
            CHECK(q <= prev);
            if (t >= sched.horizon) CHECK(q == sched.lower);
            prev = q;
        }
    }
}

TEST_CASE("quadratic and logarithmic schedules follow their closed forms") {
    const CoolingSchedule quad = CoolingSchedule::make(CoolingKind::quadratic, 100, 10, 10);
    // a = (U - L)/T^2 = 0.9 -> Q(5) = 100 - 0.9*25 = 77.5, rounds to 78
    CHECK(quad.q_at(5) == 78);
    CHECK(quad.q_at(1) == 99);
    CHECK(quad.q_at(10) == 10);

    const CoolingSchedule lg = CoolingSchedule::make(CoolingKind::logarithmic, 100, 10, 100);
    CHECK(lg.q_at(1) == 100); // log 1 = 0
    CHECK(lg.q_at(100) == 10);
    CHECK(lg.q_at(10) == 55); // U - (U-L)/log(100) * log(10) = 55
}

TEST_CASE("sigmoidal calibration reaches the target at the horizon") {
    const CoolingSchedule sig = CoolingSchedule::make(CoolingKind::sigmoidal, 200, 20, 50);
    CHECK(sig.q_at(50) == 20);
    CHECK(sig.q_at(51) == 20);
    CHECK(sig.q_at(1) <= 200);

    const CoolingSchedule to_zero = CoolingSchedule::make(CoolingKind::sigmoidal, 64, 0, 32);
    CHECK(to_zero.q_at(32) == 0);
}

TEST_CASE("constant schedule ignores the horizon") {
    const CoolingSchedule c = CoolingSchedule::constant(7);
    CHECK(c.q_at(1) == 7);
    CHECK(c.q_at(1000) == 7);
}

TEST_CASE("degenerate horizons and invalid ranges") {
    const CoolingSchedule one = CoolingSchedule::make(CoolingKind::quadratic, 50, 5, 1);
    CHECK(one.q_at(1) == 5); // horizon 1: target from the first iteration
    CHECK_THROWS_AS((void)CoolingSchedule::make(CoolingKind::quadratic, 5, 50, 10), Error);
    CHECK_THROWS_AS((void)one.q_at(0), Error);
}

TEST_CASE("schedule name parsing") {
    CHECK(parse_cooling("quad") == CoolingKind::quadratic);
    CHECK(parse_cooling("log") == CoolingKind::logarithmic);
    CHECK_THROWS_AS((void)parse_cooling("linear"), Error);
}
