#include "acpc/device.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace acpc;
using Catch::Approx;

namespace {

DeviceState fresh(const DeviceParams& p = {}) { return DeviceState{p, {}, p.t0}; }

double dr_dt(const DeviceState& d, double t, double i, double v_gs) {
    const double h = 0.5;
    return (r_on(d, t + h, i, v_gs) - r_on(d, t - h, i, v_gs)) / (2 * h);
}

}  // namespace

TEST_CASE("threshold voltage", "[device]") {
    auto d = fresh();
    CHECK(v_th(d, 25.0) == Approx(2.7));
    CHECK(v_th(d, 125.0) == Approx(2.06));
    d.aging.dv_th = 0.5;
    CHECK(v_th(d, 25.0) == Approx(3.2));
}

TEST_CASE("on-resistance calibration anchor and sensitivity", "[device]") {
    SECTION("module") {
        const auto p = module_profile();
        const auto d = fresh(p);
        CHECK(r_on(d, p.t0, p.i_nominal, 15.0) == Approx(1.58 / 400.0).epsilon(1e-12));
        CHECK(conduction_voltage(d, 400.0, p.t0, 15.0) == Approx(1.58).epsilon(1e-12));
        CHECK(dr_dt(d, p.t0, p.i_nominal, 15.0) == Approx(12e-6).epsilon(0.10));
    }
    SECTION("vendor A") {
        const auto p = vendor_a_profile();
        const auto d = fresh(p);
        CHECK(r_on(d, p.t0, p.i_nominal, 15.0) == Approx(0.35).epsilon(1e-12));
        CHECK(dr_dt(d, p.t0, p.i_nominal, 15.0) == Approx(2.4e-3).epsilon(0.10));
        CHECK(p.rho_vth == -6.4e-3);
    }
    SECTION("vendor B") {
        const auto p = vendor_b_profile();
        CHECK(dr_dt(fresh(p), p.t0, p.i_nominal, 15.0) == Approx(1.6e-3).epsilon(0.10));
    }
    SECTION("default parameters match the module profile") {
        const auto d = fresh();
        CHECK(r_on(d, 25.0, 400.0, 15.0) == Approx(3.95e-3).epsilon(1e-3));
    }
}

TEST_CASE("halving the overdrive doubles the channel term", "[device]") {
    auto d = fresh();
    const double od = overdrive(d, 25.0, 15.0);
    const double ch0 = r_channel(d, 25.0, 15.0);
    d.aging.dv_th = od / 2;
    CHECK(r_channel(d, 25.0, 15.0) == Approx(2 * ch0).epsilon(1e-12));
    d.aging.dv_th = od;
    CHECK_THROWS_AS(r_on(d, 25.0, 100.0, 15.0), ChannelOff);
}

TEST_CASE("conduction voltage by quadrant", "[device]") {
    auto p = DeviceParams{};
    p.rho_i = 0.0;
    p.r_drift0 = 2e-3;
    p.k_ch = 2e-3 * (15.0 - p.v_th0);  // 4 mOhm at t0
    const auto d = fresh(p);
    CHECK(conduction_voltage(d, 100.0, 25.0, 15.0) == Approx(0.40));
    CHECK(conduction_voltage(d, -100.0, 25.0, -4.0) == Approx(-v_sd(d, 100.0, 25.0)));
    CHECK(conduction_voltage(d, 0.0, 25.0, 15.0) == 0.0);
    // Channel on in reverse: channel alone below the knee.
    CHECK(conduction_voltage(d, -100.0, 25.0, 15.0) == Approx(-0.40));
    // Above the knee the parallel diode caps the drop below the channel-only value.
    const double big = conduction_voltage(d, -2000.0, 25.0, 15.0);
    CHECK(big < 0.0);
    CHECK(-big < 2000.0 * 4e-3);
    CHECK(-big >= v_sd(d, 0.0, 25.0));
}

TEST_CASE("body diode forward drop", "[device]") {
    auto d = fresh();
    CHECK(v_sd(d, 0.0, 25.0) == Approx(d.params.v_j0));
    const double s = (v_sd(d, 1e-3, 35.0) - v_sd(d, 1e-3, 15.0)) / 20.0;
    CHECK(s == Approx(-2.65e-3).epsilon(0.05));
    const double hi = (v_sd(d, 400.0, 35.0) - v_sd(d, 400.0, 15.0)) / 20.0;
    CHECK(hi == Approx(-4.8e-3).epsilon(0.05));
    const double before = v_sd(d, 150.0, 80.0);
    d.aging.dv_sd = 0.7;
    CHECK(v_sd(d, 150.0, 80.0) - before == Approx(0.7).epsilon(1e-12));
}

TEST_CASE("losses", "[device]") {
    auto p = DeviceParams{};
    p.rho_i = 0.0;
    p.r_drift0 = 2e-3;
    p.k_ch = 2e-3 * (15.0 - p.v_th0);
    const auto d = fresh(p);
    CHECK(losses(d, 0.0, 25.0, 800.0, 0.0, 0.5, 15.0) == 0.0);
    CHECK(losses(d, 100.0, 25.0, 800.0, 0.0, 0.5, 15.0) == Approx(20.0));
    const double cond = losses(d, 100.0, 25.0, 800.0, 0.0, 0.5, 15.0);
    const double p1 = losses(d, 100.0, 25.0, 800.0, 22e3, 0.5, 15.0) - cond;
    const double p2 = losses(d, 100.0, 25.0, 800.0, 44e3, 0.5, 15.0) - cond;
    CHECK(p2 == Approx(2 * p1));
    CHECK(p1 == Approx(22e3 * (p.e_on0 + p.e_off0) * 100.0 / 400.0));
    // Third quadrant with the channel off: diode conduction.
    CHECK(losses(d, -100.0, 25.0, 800.0, 0.0, 1.0, -4.0) == Approx(100.0 * v_sd(d, 100.0, 25.0)));
}

TEST_CASE("on-resistance monotonicity", "[device][property]") {
    auto d = fresh();
    double prev = r_on(d, 80.0, 300.0, 15.0);
    for (int k = 1; k <= 20; ++k) {
        d.aging.delta_pkg = 0.01 * k;
        const double r = r_on(d, 80.0, 300.0, 15.0);
        CHECK(r > prev);
        prev = r;
    }
    d = fresh();
    prev = r_on(d, 80.0, 300.0, 15.0);
    for (int k = 1; k <= 20; ++k) {
        d.aging.dv_th = 0.05 * k;
        const double r = r_on(d, 80.0, 300.0, 15.0);
        CHECK(r > prev);
        prev = r;
    }
    d = fresh();
    double vprev = v_sd(d, 100.0, 50.0);
    for (int k = 1; k <= 14; ++k) {
        d.aging.dv_sd = 0.05 * k;
        CHECK(v_sd(d, 100.0, 50.0) > vprev);
        vprev = v_sd(d, 100.0, 50.0);
    }
}

TEST_CASE("temperature coefficients of the two terms", "[device][property]") {
    for (double t : {0.0, 25.0, 75.0, 150.0}) {
        auto channel_only = DeviceParams{};
        channel_only.r_drift0 = 1e-30;
        channel_only.rho_i = 0.0;
        CHECK(dr_dt(fresh(channel_only), t, 400.0, 15.0) < 0.0);

        auto drift_only = DeviceParams{};
        drift_only.k_ch = 1e-30;
        drift_only.rho_i = 0.0;
        CHECK(dr_dt(fresh(drift_only), t, 400.0, 15.0) > 0.0);
    }
}

TEST_CASE("parameter invariants", "[device]") {
    CHECK_NOTHROW(check_params(DeviceParams{}));
    auto p = DeviceParams{};
    p.rho_vth = 1e-3;
    CHECK_THROWS_AS(check_params(p), ConfigError);
    p = DeviceParams{};
    p.k_ch = 0.0;
    CHECK_THROWS_AS(check_params(p), ConfigError);
    p = DeviceParams{};
    p.v_gs_on = 2.0;
    CHECK_THROWS_AS(check_params(p), ConfigError);
}

TEST_CASE("threshold shift for a target on-state voltage", "[device]") {
    const auto p = module_profile();
    DeviceState d = fresh(p);
    d.aging.dv_th = dv_th_for_vds(p, 2.6);
    CHECK(conduction_voltage(d, p.i_nominal, p.t0, 15.0) == Approx(2.6).epsilon(1e-12));
    CHECK_THROWS_AS(dv_th_for_vds(p, 0.5), ConfigError);
}
