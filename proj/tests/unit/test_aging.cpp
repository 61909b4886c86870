#include "acpc/aging.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace acpc;
using Catch::Approx;

TEST_CASE("null trajectory leaves the state alone", "[aging]") {
    AgingState s{0.03, 0.1, 0.2, 5};
    const auto n = apply_aging(s, AgingTrajectory{}, 500);
    CHECK(n.delta_pkg == 0.03);
    CHECK(n.dv_th == 0.1);
    CHECK(n.dv_sd == 0.2);
    CHECK(n.cycles_accumulated == 500);
}

TEST_CASE("step event lands exactly on its cycle", "[aging]") {
    AgingTrajectory t;
    t.pkg.steps = {{10000, 0.05}};
    CHECK(apply_aging({}, t, 9999).delta_pkg == 0.0);
    CHECK(apply_aging({}, t, 10000).delta_pkg == 0.05);
    CHECK(apply_aging({}, t, 20000).delta_pkg == 0.05);
}

TEST_CASE("ramp interpolates from zero and holds after the last breakpoint", "[aging]") {
    MechanismTrajectory m;
    m.ramp = {{1000, 0.1}, {3000, 0.3}};
    CHECK(m.value_at(0) == 0.0);
    CHECK(m.value_at(500) == Approx(0.05));
    CHECK(m.value_at(2000) == Approx(0.2));
    CHECK(m.value_at(3000) == Approx(0.3));
    CHECK(m.value_at(9000) == Approx(0.3));
}

TEST_CASE("knee grows quadratically to its extra", "[aging]") {
    MechanismTrajectory m;
    m.knee = Knee{100, 200, 0.4};
    CHECK(m.value_at(100) == 0.0);
    CHECK(m.value_at(150) == Approx(0.1));
    CHECK(m.value_at(200) == Approx(0.4));
    CHECK(m.value_at(400) == Approx(0.4));
}

TEST_CASE("default gate-oxide trajectory ends at 2.6 V on-state drop", "[aging]") {
    const auto p = module_profile();
    AgingTrajectory t;
    t.vth = default_gate_oxide_trajectory(p, 10000);
    DeviceState d{p, {}, p.t0};
    CHECK(conduction_voltage(d, p.i_nominal, p.t0, 15.0) == Approx(1.58));
    d.aging = apply_aging({}, t, 10000);
    CHECK(conduction_voltage(d, p.i_nominal, p.t0, 15.0) == Approx(2.6).epsilon(1e-9));
    CHECK_NOTHROW(check_trajectory(t));
}

TEST_CASE("trajectories are monotone", "[aging][property]") {
    const auto p = module_profile();
    AgingTrajectory t;
    t.pkg.ramp = {{2000, 0.2}};
    t.pkg.steps = {{700, 0.02}};
    t.pkg.knee = Knee{1500, 3000, 0.1};
    t.vth = default_gate_oxide_trajectory(p, 3000);
    t.vsd = default_body_diode_trajectory(3000);
    AgingState s;
    for (std::uint64_t c = 0; c <= 3500; c += 7) {
        const auto n = apply_aging(s, t, c);
        CHECK(n.delta_pkg >= s.delta_pkg);
        CHECK(n.dv_th >= s.dv_th);
        CHECK(n.dv_sd >= s.dv_sd);
        CHECK(n.dv_sd <= 0.7 + 1e-12);
        s = n;
    }
    CHECK(s.dv_sd == Approx(0.7));
}

TEST_CASE("backwards cycle count is rejected", "[aging]") {
    AgingState s;
    s.cycles_accumulated = 10;
    CHECK_THROWS_AS(apply_aging(s, AgingTrajectory{}, 9), Error);
}

TEST_CASE("trajectory validation", "[aging]") {
    AgingTrajectory t;
    t.pkg.ramp = {{100, 0.2}, {50, 0.3}};
    CHECK_THROWS_AS(check_trajectory(t), ConfigError);
    t = {};
    t.pkg.ramp = {{100, 0.2}, {200, 0.1}};
    CHECK_THROWS_AS(check_trajectory(t), ConfigError);
    t = {};
    t.vsd.ramp = {{100, 0.9}};
    CHECK_THROWS_AS(check_trajectory(t), ConfigError);
    t = {};
    t.vth.steps = {{10, -0.1}};
    CHECK_THROWS_AS(check_trajectory(t), ConfigError);
}
