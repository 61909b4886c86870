#include "acpc/cycling.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace acpc;
using Catch::Approx;

namespace {

CycleRecord record(std::uint64_t k, double r_on, std::optional<double> v_th, double v_sd) {
    CycleRecord r;
    r.cycle_index = k;
    for (auto& d : r.devices) {
        d.r_on_est = r_on;
        d.v_th = v_th;
        d.v_sd = v_sd;
    }
    return r;
}

Scenario fixed_times(double on, double off) {
    Scenario s;
    s.bench.t_on = on;
    s.bench.t_off = off;
    s.sampler.budget = 300;
    s.startup.interval = 0;
    return s;
}

}  // namespace

TEST_CASE("warning flags", "[cycling]") {
    const WarningPolicy policy;
    std::vector<CycleRecord> flat;
    for (int k = 0; k < 20; ++k) flat.push_back(record(k, 4e-3, 2.7, 2.8));
    for (unsigned f : evaluate_warnings(flat, policy)) CHECK(f == 0u);

    auto drift = flat;
    drift.push_back(record(20, 4e-3 * 1.06, std::nullopt, 2.8));
    for (unsigned f : evaluate_warnings(drift, policy)) CHECK(f == PackageWarning);

    auto under = flat;
    under.push_back(record(20, 4e-3 * 1.04, std::nullopt, 2.8));
    for (unsigned f : evaluate_warnings(under, policy)) CHECK(f == 0u);

    // Body-diode shift ramping up raises its flag once past 0.1 V.
    std::vector<CycleRecord> diode;
    std::uint64_t first = 0;
    for (int k = 0; k <= 70; ++k) {
        diode.push_back(record(k, 4e-3, std::nullopt, 2.8 + 0.011 * k));
        if (!first && evaluate_warnings(diode, policy)[0] & BodyDiodeWarning) first = k;
    }
    CHECK(first == 10);

    auto oxide = flat;
    oxide.push_back(record(20, 4e-3, 3.3, 2.8));
    CHECK(evaluate_warnings(oxide, policy)[3] == GateOxideWarning);
}

TEST_CASE("warnings latch", "[cycling]") {
    WarningTracker t;
    auto a = record(0, 4e-3, 2.7, 2.8);
    auto b = record(1, 4.4e-3, std::nullopt, 2.8);
    auto c = record(2, 4e-3, std::nullopt, 2.8);
    t.update(a);
    t.update(b);
    t.update(c);
    CHECK(a.devices[0].warnings == 0u);
    CHECK(b.devices[0].warnings == PackageWarning);
    CHECK(c.devices[0].warnings == PackageWarning);
    CHECK(warning_string(PackageWarning | BodyDiodeWarning) == "package|body_diode");
    CHECK(warning_string(0).empty());
}

TEST_CASE("start-up measurements separate package and gate-oxide drift", "[cycling]") {
    SECTION("package only") {
        Bench b(validate(fixed_times(0.3, 0.3)));
        const double target = 2e-3;
        for (int d = 0; d < k_iut_devices; ++d) b.devices()[d].aging.delta_pkg = target / b.scenario().device.r_drift0;
        b.startup_measurements();
        for (int d = 0; d < k_iut_devices; ++d) {
            CHECK(b.lut(d).offset() == Approx(target).margin(2e-5));
            CHECK(b.desat(d).threshold == Approx(b.scenario().desat.threshold).margin(0.005));
        }
        CHECK(b.lut(7).offset() == Approx(0.0).margin(2e-5));
    }
    SECTION("gate oxide only") {
        Bench b(validate(fixed_times(0.3, 0.3)));
        for (int d = 0; d < k_iut_devices; ++d) b.devices()[d].aging.dv_th = 0.5;
        const auto r = b.startup_measurements();
        const auto& p = b.scenario().device;
        const double od0 = p.v_gs_on - p.v_th0;
        const double expect = p.i_nominal * (p.k_ch / (od0 - 0.5) - p.k_ch / od0);
        for (int d = 0; d < k_iut_devices; ++d) {
            CHECK(r.dv_th[d] == Approx(0.5).margin(0.1));
            CHECK(b.desat(d).threshold - b.scenario().desat.threshold == Approx(expect).epsilon(0.25));
            CHECK(b.desat(d).threshold > b.scenario().desat.threshold);
            CHECK(b.lut(d).offset() == Approx(0.0).margin(3e-5));
            CHECK(b.lut(d).oxide_shift().front() > 0.0);
        }
    }
}

TEST_CASE("fixed-time cycling reaches a periodic steady state", "[cycling]") {
    Bench b(validate(fixed_times(0.3, 0.5)));
    Campaign c(b);
    c.run(60);
    REQUIRE(c.records().size() == 60);
    const auto& last = c.records().back();
    CHECK(last.t_on_actual == Approx(0.3).margin(b.dt()));
    CHECK(last.t_off_actual == Approx(0.5).margin(b.dt()));
    for (int d = 0; d < k_iut_devices; ++d) {
        double lo = 1e9, hi = -1e9;
        for (std::size_t k = 50; k < 60; ++k) {
            const double dt = c.records()[k].devices[d].delta_t_j;
            lo = std::min(lo, dt);
            hi = std::max(hi, dt);
        }
        CHECK(hi - lo < 0.5);
        CHECK(last.devices[d].delta_t_j > 5.0);
        CHECK(last.devices[d].t_j_max >= last.devices[d].t_j_min);
        CHECK(last.devices[d].r_on_est.has_value());
        CHECK(last.devices[d].v_sd.has_value());
    }
    CHECK(c.records()[0].devices[0].v_th.has_value());
    CHECK_FALSE(c.records()[1].devices[0].v_th.has_value());
}

TEST_CASE("package aging lifts the peak temperature under fixed times", "[cycling]") {
    auto s = fixed_times(0.3, 0.5);
    s.aging.pkg.ramp = {{40, 0.5}};
    Bench b(validate(s));
    Campaign c(b);
    c.run(40);
    // Past the initial warm-up, every cycle is hotter than the one before.
    for (std::size_t k = 21; k < 40; ++k) {
        for (int d = 0; d < k_iut_devices; ++d) {
            CHECK(c.records()[k].devices[d].t_j_max > c.records()[k - 1].devices[d].t_j_max);
        }
    }
}

TEST_CASE("case-swing cycling switches on the NTC reading", "[cycling]") {
    Scenario s;
    s.bench.technique = Technique::CaseSwing;
    s.bench.t_case_max = 45.0;
    s.bench.t_case_min = 35.0;
    s.sampler.budget = 300;
    s.startup.interval = 0;
    Bench b(validate(s));
    Campaign c(b);
    c.run(3);
    for (const auto& r : c.records()) {
        CHECK(r.t_on_actual > 0.0);
        CHECK(r.t_off_actual > 0.0);
    }
    double ntc = -1e9;
    for (int d = 0; d < k_iut_devices; ++d) ntc = std::max(ntc, b.ntc_reading(d));
    CHECK(ntc <= 35.0 + 0.01);
}

TEST_CASE("junction-swing cycling holds the swing", "[cycling]") {
    Scenario s;
    s.bench.technique = Technique::JunctionSwing;
    s.bench.t_j_max = 100.0;
    s.bench.t_j_min = 70.0;
    s.sampler.budget = 300;
    s.startup.interval = 0;
    Bench b(validate(s));
    Campaign c(b);
    c.run(8);
    for (std::size_t k = 1; k < c.records().size(); ++k) {
        for (int d = 0; d < k_iut_devices; ++d) {
            CHECK(std::abs(c.records()[k].devices[d].delta_t_j - 30.0) <= 2.0);
        }
    }
}

TEST_CASE("stalled phases time out", "[cycling]") {
    Scenario s;
    s.bench.technique = Technique::CaseSwing;
    s.bench.t_case_max = 190.0;
    s.bench.t_case_min = 35.0;
    s.bench.i_ref_peak = 20.0;
    s.sense_current = 10.0;
    s.max_phase_time = 1.0;
    Bench b(validate(s));
    CHECK_THROWS_AS(run_cycle(b, 0), Timeout);
}

TEST_CASE("campaign start-up cadence", "[cycling]") {
    auto s = fixed_times(0.1, 0.1);
    s.startup.interval = 3;
    Bench b(validate(s));
    Campaign c(b);
    CHECK(c.startup_due(0));
    CHECK_FALSE(c.startup_due(1));
    CHECK(c.startup_due(3));
    int startups = 0;
    c.on_startup = [&](std::uint64_t, const StartupResult&) { ++startups; };
    int records = 0;
    c.on_record = [&](const CycleRecord&) { ++records; };
    c.run(7);
    CHECK(startups == 3);
    CHECK(records == 7);
    CHECK(c.next_cycle() == 7);
    CHECK(c.records()[3].devices[0].v_th.has_value());
    CHECK_FALSE(c.records()[4].devices[0].v_th.has_value());
}
