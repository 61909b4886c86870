#include "acpc/transforms.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace acpc;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

// Independent oracle: duty-weighted pole voltages minus their mean give the
// volt-second average phase voltage of a star load.
Abc averaged_phase_voltage(const Abc& d, double v_dc) {
    const double mean = (d[0] + d[1] + d[2]) / 3.0;
    return {(d[0] - mean) * v_dc, (d[1] - mean) * v_dc, (d[2] - mean) * v_dc};
}

// Reference set a = A cos(theta - phi) in the stationary frame, expressed in dq at theta.
DqPair dq_at_stationary_angle(double magnitude, double angle, double theta) {
    const Abc v{magnitude * std::cos(angle), magnitude * std::cos(angle - 2 * pi / 3),
                magnitude * std::cos(angle + 2 * pi / 3)};
    return park(v, theta);
}

}  // namespace

TEST_CASE("park examples", "[transforms]") {
    const auto z = park({0, 0, 0}, 1.234);
    CHECK(z.d == 0.0);
    CHECK(z.q == 0.0);

    const auto a = park({100, -50, -50}, 0.0);
    CHECK(a.d == Approx(100.0));
    CHECK(a.q == Approx(0.0).margin(1e-12));

    const auto b = park({0, 86.60254037844386, -86.60254037844386}, pi / 2);
    CHECK(b.d == Approx(100.0).epsilon(1e-12));
    CHECK(b.q == Approx(0.0).margin(1e-9));
}

TEST_CASE("inverse park examples", "[transforms]") {
    const auto z = inverse_park({0, 0}, 0.7);
    for (double v : z) CHECK(v == 0.0);
    const auto a = inverse_park({100, 0}, 0.0);
    CHECK(a[0] == Approx(100.0));
    CHECK(a[1] == Approx(-50.0));
    CHECK(a[2] == Approx(-50.0));
}

TEST_CASE("park round trip on random pairs", "[transforms][property]") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> val(-1000.0, 1000.0), ang(0.0, 2 * pi);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const DqPair x{val(rng), val(rng)};
        const double th = ang(rng);
        const auto y = park(inverse_park(x, th), th);
        const double scale = std::max(1.0, std::hypot(x.d, x.q));
        worst = std::max({worst, std::abs(y.d - x.d) / scale, std::abs(y.q - x.q) / scale});
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("park is amplitude invariant for a shifted balanced set", "[transforms][property]") {
    const double amp = 250.0;
    for (double phi : {0.0, 0.3, -1.1, pi / 2, pi}) {
        for (int k = 0; k < 50; ++k) {
            const double th = 2 * pi * k / 50.0;
            const Abc x{amp * std::cos(th - phi), amp * std::cos(th - phi - 2 * pi / 3),
                        amp * std::cos(th - phi + 2 * pi / 3)};
            const auto dq = park(x, th);
            CHECK(std::abs(dq.d - amp * std::cos(phi)) < 1e-9);
            CHECK(std::abs(dq.q + amp * std::sin(phi)) < 1e-9);
        }
    }
}

TEST_CASE("instantaneous power matches in both frames", "[transforms][property]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> val(-500.0, 500.0), ang(0.0, 2 * pi);
    for (int k = 0; k < 500; ++k) {
        const double th = ang(rng);
        const DqPair v{val(rng), val(rng)}, i{val(rng), val(rng)};
        const auto va = inverse_park(v, th), ia = inverse_park(i, th);
        const double p_dq = 1.5 * (v.d * i.d + v.q * i.q);
        const double p_abc = va[0] * ia[0] + va[1] * ia[1] + va[2] * ia[2];
        CHECK(std::abs(p_dq - p_abc) <= 1e-6 * std::max(1.0, std::abs(p_abc)));
    }
}

TEST_CASE("svpwm examples", "[transforms]") {
    const double v_dc = 800.0;
    const auto z = svpwm_duties({0, 0}, 0.3, v_dc);
    for (double d : z.duty) CHECK(d == Approx(0.5));
    CHECK_FALSE(z.saturated);

    const double limit = v_dc / std::numbers::sqrt3;
    const double theta = 1.0;
    const auto edge = svpwm_duties(dq_at_stationary_angle(limit, pi / 6, theta), theta, v_dc);
    CHECK(edge.duty[0] == Approx(1.0).margin(1e-9));
    CHECK(edge.duty[1] == Approx(0.5).margin(1e-9));
    CHECK(edge.duty[2] == Approx(0.0).margin(1e-9));
    CHECK_FALSE(edge.saturated);

    const auto over = svpwm_duties(dq_at_stationary_angle(1.2 * limit, 0.4, theta), theta, v_dc);
    CHECK(over.saturated);
    const auto v = averaged_phase_voltage(over.duty, v_dc);
    const auto dq = park(v, theta);
    CHECK(std::hypot(dq.d, dq.q) == Approx(limit).epsilon(1e-9));
}

TEST_CASE("svpwm volt-second fidelity over a fundamental period", "[transforms][property]") {
    const double v_dc = 800.0;
    for (double m : {0.1, 0.5, 0.8, 1.0}) {
        const double mag = m * v_dc / std::numbers::sqrt3;
        double err = 0.0;
        const int n = 440;
        for (int k = 0; k < n; ++k) {
            const double th = 2 * pi * k / n;
            const DqPair ref{mag * 0.6, mag * 0.8};
            const auto r = svpwm_duties(ref, th, v_dc);
            CHECK_FALSE(r.saturated);
            const auto cmd = inverse_park(ref, th);
            const auto got = averaged_phase_voltage(r.duty, v_dc);
            for (int p = 0; p < 3; ++p) err += std::abs(cmd[p] - got[p]);
        }
        CHECK(err / (3.0 * n) < 0.005 * v_dc);
    }
}

TEST_CASE("svpwm duties stay in the unit interval", "[transforms][property]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> val(-2000.0, 2000.0), ang(0.0, 2 * pi);
    for (int k = 0; k < 5000; ++k) {
        const auto r = svpwm_duties({val(rng), val(rng)}, ang(rng), 800.0);
        for (double d : r.duty) {
            CHECK(d >= 0.0);
            CHECK(d <= 1.0);
        }
    }
}
