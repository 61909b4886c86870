#include "acpc/thermal.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace acpc;
using Catch::Approx;

TEST_CASE("single stage reaches P*R above the reference", "[thermal]") {
    FosterNetwork net({{0.1, 10.0}});
    ThermalSample s{};
    for (int k = 0; k < 20000; ++k) s = foster_step(net, 100.0, 25.0, 1e-3);
    CHECK(s.t_j == Approx(35.0).epsilon(1e-9));
    CHECK(s.t_case == Approx(35.0).epsilon(1e-9));
}

TEST_CASE("single stage at one time constant", "[thermal]") {
    FosterNetwork net({{0.1, 10.0}});
    ThermalSample s{};
    for (int k = 0; k < 1000; ++k) s = foster_step(net, 100.0, 25.0, 1e-3);
    const double oracle = 25.0 + 10.0 * (1.0 - std::exp(-1.0));
    CHECK(std::abs(s.t_j - oracle) / oracle < 1e-6);
    CHECK(s.t_j == Approx(31.32).margin(0.005));
}

TEST_CASE("no loss keeps the junction at the reference", "[thermal]") {
    auto net = default_foster_network();
    for (int k = 0; k < 1000; ++k) {
        const auto s = foster_step(net, 0.0, 40.0, 1e-4);
        CHECK(s.t_j == 40.0);
    }
}

TEST_CASE("step size must resolve the fastest stage", "[thermal]") {
    auto net = default_foster_network();
    CHECK(net.min_tau() == Approx(1e-3));
    CHECK_THROWS_AS(foster_step(net, 10.0, 25.0, 0.3e-3), StepTooLarge);
    CHECK_NOTHROW(foster_step(net, 10.0, 25.0, 0.2e-3));
    CHECK_THROWS_AS(FosterNetwork({{0.0, 1.0}}), ConfigError);
}

TEST_CASE("multi-stage step response matches the analytic sum", "[thermal][property]") {
    auto net = default_foster_network();
    const double dt = 1.0 / 22e3;
    const double p = 300.0;
    const int n = 22000;
    for (int k = 0; k < n; ++k) foster_step(net, p, 25.0, dt);
    const double t = n * dt;
    double oracle = 0.0;
    for (const auto& st : net.stages()) oracle += p * st.r_th * (1.0 - std::exp(-t / st.tau()));
    CHECK(std::abs(net.junction_rise() - oracle) / oracle < 1e-6);
}

TEST_CASE("stage energy balance", "[thermal][property]") {
    // Heat in = C dT + integral of T / R, with the exact integral of the exponential.
    FosterNetwork net({{0.05, 4.0}});
    const double r = 0.05, c = 4.0, tau = r * c, p = 250.0, dt = 1e-3;
    double stored0 = 0.0, out = 0.0;
    for (int k = 0; k < 500; ++k) {
        const double t0 = net.stage_temps()[0];
        net.advance(p, dt);
        const double ss = p * r;
        // Integral over the step of T(t) = ss + (t0 - ss) e^(-t/tau).
        out += (ss * dt + (t0 - ss) * tau * (1.0 - std::exp(-dt / tau))) / r;
    }
    const double stored = c * (net.stage_temps()[0] - stored0);
    CHECK((stored + out) == Approx(p * 500 * dt).epsilon(1e-3));
}

TEST_CASE("pump off slows the cool-down", "[thermal]") {
    const auto time_to_50 = [](bool pump) {
        CoolingState c;
        auto net = default_foster_network();
        const auto b = cooling_step(c, pump);
        net.set_boundary_resistance(b.r_boundary);
        const double p = 125.0 / net.total_r_th();
        std::vector<double> temps;
        for (std::size_t k = 0; k < net.stages().size(); ++k) temps.push_back(p * net.stage_r(k));
        net.set_stage_temps(temps);
        double t = 0.0;
        const double dt = 1e-4;
        while (b.t_ref + net.junction_rise() > 50.0 && t < 200.0) {
            foster_step(net, 0.0, b.t_ref, dt);
            t += dt;
        }
        return t;
    };
    const double on = time_to_50(true), off = time_to_50(false);
    CHECK(on < 200.0);
    CHECK(off > on);
}

TEST_CASE("cooling boundary by pump state", "[thermal]") {
    CoolingState c;
    c.coolant_temp = 22.0;
    c.ambient = 30.0;
    const auto on = cooling_step(c, true);
    CHECK(on.t_ref == 22.0);
    CHECK(on.r_boundary == c.r_boundary_on);
    const auto off = cooling_step(c, false);
    CHECK(off.t_ref == 30.0);
    CHECK(off.r_boundary == c.r_boundary_off);
    CHECK_FALSE(c.pump_on);

    CoolingState bad;
    bad.r_boundary_off = bad.r_boundary_on;
    CHECK_THROWS_AS(check_cooling(bad), ConfigError);
}

TEST_CASE("heat beyond the plate capacity warms the loop without bound", "[thermal]") {
    CoolingState c;
    cooling_step(c, true);
    double prev = c.coolant_temp;
    for (int k = 0; k < 100; ++k) {
        coolant_update(c, 2000.0, 1.0);
        CHECK(c.coolant_temp > prev);
        prev = c.coolant_temp;
    }
    CHECK(c.capacity_exceeded);
    CHECK(c.coolant_temp == Approx(25.0 + 100 * 500.0 / c.coolant_capacity));

    CoolingState ok;
    cooling_step(ok, true);
    for (int k = 0; k < 100; ++k) coolant_update(ok, 1400.0, 1.0);
    CHECK_FALSE(ok.capacity_exceeded);
    CHECK(ok.coolant_temp == 25.0);
}

TEST_CASE("NTC sensor", "[thermal]") {
    NtcModel exact{0.0, 0.0};
    CHECK(ntc_read(exact, 63.0, 1e-3) == 63.0);
    CHECK(ntc_read(exact, 80.0, 1e-3) == 80.0);

    NtcModel biased{3.0, 0.5};
    double r = 0.0;
    for (int k = 0; k < 20000; ++k) r = ntc_read(biased, 70.0, 1e-3);
    CHECK(r == Approx(73.0));

    NtcModel lag{0.0, 2.0};
    ntc_read(lag, 0.0, 1e-3);
    for (int k = 0; k < 2000; ++k) r = ntc_read(lag, 1.0, 1e-3);
    CHECK(r == Approx(1.0 - std::exp(-1.0)).epsilon(1e-9));
    CHECK(r == Approx(0.632).margin(1e-3));
}

TEST_CASE("junction above case above reference under positive loss", "[thermal][property]") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 800.0);
    auto net = default_foster_network();
    for (int k = 0; k < 20000; ++k) {
        const auto s = foster_step(net, u(rng), 25.0, 1e-4);
        CHECK(s.t_j >= s.t_case);
        CHECK(s.t_case >= 25.0);
    }
}

TEST_CASE("die-attach aging raises the junction-to-case rise", "[thermal][property]") {
    double prev = 0.0;
    for (double f : {1.0, 1.1, 1.3, 2.0}) {
        auto net = default_foster_network();
        net.set_r_th_aging_factor(f);
        ThermalSample s{};
        for (int k = 0; k < 400000; ++k) s = foster_step(net, 200.0, 25.0, 1e-4);
        const double rise = s.t_j - s.t_case;
        CHECK(rise > prev);
        prev = rise;
    }
    auto net = default_foster_network();
    CHECK_THROWS_AS(net.set_r_th_aging_factor(0.9), ConfigError);
}
