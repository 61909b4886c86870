#include "acpc/cycling.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace acpc;
using Catch::Approx;

namespace {

Scenario fixed_times() {
    Scenario s;
    s.bench.t_on = 0.2;
    s.bench.t_off = 0.2;
    return s;
}

template <class F>
std::string config_error_field(F&& mutate) {
    auto s = fixed_times();
    mutate(s);
    try {
        (void)validate(s);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

}  // namespace

TEST_CASE("scenario validation covers every module", "[bench]") {
    CHECK_NOTHROW(validate(fixed_times()));
    CHECK(config_error_field([](Scenario& s) { s.bench.modulation_index = 1.3; }) == "modulation_index");
    CHECK(config_error_field([](Scenario& s) { s.bench.gate_on_v = 2.0; s.bench.gate_off_v = -4.0; }) == "device.v_gs_on");
    CHECK(config_error_field([](Scenario& s) { s.device.k_ch = 0.0; }) == "device.k_ch");
    CHECK(config_error_field([](Scenario& s) { s.sense.adc_bits = 20; }) == "sense.adc_bits");
    CHECK(config_error_field([](Scenario& s) { s.desat.blanking = 0.0; }) == "desat.blanking");
    CHECK(config_error_field([](Scenario& s) { s.sampler.budget = 0; }) == "sampler.budget");
    CHECK(config_error_field([](Scenario& s) { s.sampler.window = 2.0; }) == "sampler.window");
    CHECK(config_error_field([](Scenario& s) { s.warnings.r_on_rel_threshold = 0.0; }) == "warn.r_on_rel");
    CHECK(config_error_field([](Scenario& s) { s.thermal.cooling.r_boundary_off = 0.1; }) == "cooling.r_boundary_off");
    CHECK(config_error_field([](Scenario& s) { s.aging.pkg.ramp = {{10, 0.2}, {5, 0.3}}; }) == "aging.pkg");
    CHECK(config_error_field([](Scenario& s) { s.overcurrent_factor = 1.0; }) == "overcurrent_factor");
    CHECK(config_error_field([](Scenario& s) {
              s.bench.technique = Technique::JunctionSwing;
              s.bench.t_j_max = 120.0;
              s.bench.t_j_min = 60.0;
              s.t_j_limit = 110.0;
          }) == "t_j_max");
}

TEST_CASE("device numbering", "[bench]") {
    const auto a = device_info(0);
    CHECK(a.inverter == 0);
    CHECK(a.phase == 0);
    CHECK_FALSE(a.lower);
    CHECK(a.sign == 1.0);
    const auto b = device_info(5);
    CHECK(b.inverter == 0);
    CHECK(b.phase == 2);
    CHECK(b.lower);
    CHECK(b.sign == -1.0);
    const auto c = device_info(6);
    CHECK(c.inverter == 1);
    CHECK(c.sign == -1.0);
    CHECK(device_info(7).sign == 1.0);
}

TEST_CASE("bench starts at ambient with per-device sensing mismatch", "[bench]") {
    Bench b(validate(fixed_times()));
    for (int d = 0; d < k_devices; ++d) {
        CHECK(b.t_j(d) == 25.0);
        CHECK(b.e_d(d) >= 0.3e-3);
        CHECK(b.e_d(d) <= 1.6e-3);
    }
    CHECK_FALSE(b.converter_on());
    CHECK(b.dt() == Approx(1.0 / 22e3));
}

TEST_CASE("converter tracks its reference and circulates power", "[bench]") {
    auto s = fixed_times();
    s.sampler.budget = 300;
    Bench b(validate(s));
    int windows = 0;
    double worst = 0.0;
    b.on_window = [&](const WindowEvent& e) {
        ++windows;
        worst = std::max(worst, std::abs(e.estimate.r_on - e.r_on_true) / e.r_on_true);
    };
    b.set_pump(0, false);
    b.set_converter(true, 400.0);
    b.run_fundamental_cycles(5);
    b.reset_energy();
    b.run_fundamental_cycles(10);

    const auto& c = b.controller();
    CHECK(std::hypot(c.i_meas.d - 400.0, c.i_meas.q) < 4.0);
    CHECK(windows > 0);
    CHECK(worst < 0.015);

    const auto audit = energy_audit(b.energy());
    CHECK(audit.residual < 1e-3);
    CHECK(audit.p_supply > 0.0);
    CHECK(audit.circulation_ratio > 10.0);
    for (int d = 0; d < k_iut_devices; ++d) CHECK(b.t_j(d) > 25.0);
}

TEST_CASE("energy audit arithmetic", "[bench]") {
    EnergyTelemetry lossless;
    lossless.time = 1.0;
    const auto z = energy_audit(lossless);
    CHECK(z.p_supply == 0.0);
    CHECK(z.p_loss_total == 0.0);

    EnergyTelemetry e;
    e.e_supply = 101.0;
    e.e_device_loss = 90.0;
    e.e_link_loss = 10.0;
    e.e_inductor0 = 2.0;
    e.e_inductor = 3.0;
    e.e_circulated = 5000.0;
    e.time = 2.0;
    const auto a = energy_audit(e);
    CHECK(a.p_supply == Approx(50.5));
    CHECK(a.p_loss_total == Approx(50.0));
    CHECK(a.residual == Approx(0.0).margin(1e-12));
    CHECK(a.circulation_ratio == Approx(2500.0 / 50.5));
}

TEST_CASE("same seed, same trajectory", "[bench]") {
    const auto run = [](std::uint64_t seed) {
        auto s = fixed_times();
        s.bench.rng_seed = seed;
        Bench b(validate(s));
        std::vector<double> est;
        b.on_window = [&](const WindowEvent& e) { est.push_back(e.estimate.r_on); };
        b.set_converter(true, 400.0);
        b.run_fundamental_cycles(8);
        std::vector<double> out(est);
        for (int d = 0; d < k_devices; ++d) out.push_back(b.t_j(d));
        out.push_back(b.e_d(0));
        return out;
    };
    CHECK(run(3) == run(3));
    CHECK(run(3) != run(4));
}

TEST_CASE("DESAT trip ends the heating step", "[bench]") {
    Bench b(validate(fixed_times()));
    b.set_desat(2, DesatConfig{desat_voltage(SenseCircuitParams{}, 1.0), 2e-6, false});
    b.set_converter(true, 400.0);
    try {
        b.run_fundamental_cycles(10);
        FAIL("no trip");
    } catch (const ProtectionTrip& e) {
        CHECK(e.device() == 2);
        CHECK(e.time_s() == Approx(b.time()));
    }
}

TEST_CASE("overcurrent trip", "[bench]") {
    auto s = fixed_times();
    s.overcurrent_factor = 1.5;
    Bench b(validate(s));
    b.set_converter(true, 700.0);
    CHECK_THROWS_AS(b.run_fundamental_cycles(10), ProtectionTrip);
}

TEST_CASE("idle bench relaxes back to ambient", "[bench]") {
    Bench b(validate(fixed_times()));
    b.set_pump(0, false);
    b.set_converter(true, 400.0);
    b.run_for(0.3);
    const double hot = b.t_j(0);
    CHECK(hot > 40.0);
    b.cool_to_ambient(0.5);
    for (int d = 0; d < k_devices; ++d) CHECK(b.t_j(d) - 25.0 <= 0.5);
    CHECK_FALSE(b.converter_on());
}

TEST_CASE("start-up measurements on a fresh bench", "[bench]") {
    Bench b(validate(fixed_times()));
    const auto r = b.startup_measurements();
    for (int d = 0; d < k_devices; ++d) {
        CHECK(std::abs(r.dv_th[d]) < 0.1);
        CHECK(r.v_th[d] == Approx(2.7).margin(0.1));
        CHECK(b.lut(d).offset() == Approx(0.0).margin(2e-5));
        CHECK(b.desat(d).threshold == Approx(b.scenario().desat.threshold).margin(0.01));
        CHECK(r.v_sd[d] == Approx(b.scenario().device.v_j0).margin(0.02));
    }
    b.set_converter(true, 100.0);
    CHECK_THROWS_AS(b.startup_measurements(), Error);
}

TEST_CASE("waveform rows follow the decimation", "[bench]") {
    auto s = fixed_times();
    s.waveform_decimation = 10;
    Bench b(validate(s));
    int rows = 0;
    b.on_waveform = [&](const WaveformRow& r) {
        ++rows;
        CHECK(std::abs(r.i_abc[0] + r.i_abc[1] + r.i_abc[2]) < 1e-9);
    };
    b.set_converter(true, 400.0);
    b.run_fundamental_cycles(2);
    CHECK(rows >= 87);
    CHECK(rows <= 89);
}
