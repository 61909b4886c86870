#include "acpc/plant.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace acpc;
using Catch::Approx;

TEST_CASE("constant 70 V across a lossless link ramps the current 1 A in 10 us", "[plant]") {
    // Pole a 105 V above b and c: the star sees 2/3 of it, 70 V.
    const Abc test{0.5 + 105.0 / 800.0, 0.5, 0.5};
    const Abc load{0.5, 0.5, 0.5};
    const PlantParams p{700e-6, 0.0};
    const auto s = plant_step(PlantState{}, test, load, 800.0, 10e-6, p);
    CHECK(s.i_abc[0] == Approx(1.0).epsilon(1e-12));
    CHECK(s.i_abc[1] == Approx(-0.5).epsilon(1e-12));
    CHECK(s.i_abc[2] == Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("equal duties let the current decay with L/R", "[plant]") {
    const PlantParams p{700e-6, 0.1};
    const double tau = p.inductance / p.link_resistance;
    const double dt = 1e-6;
    PlantState s;
    s.i_abc = {100.0, -60.0, -40.0};
    const Abc d{0.3, 0.7, 0.5};
    const int n = static_cast<int>(std::lround(tau / dt));
    for (int k = 0; k < n; ++k) s = plant_step(s, d, d, 800.0, dt, p);
    CHECK(s.i_abc[0] == Approx(100.0 * std::exp(-1.0)).epsilon(1e-6));
    CHECK(s.i_abc[1] == Approx(-60.0 * std::exp(-1.0)).epsilon(1e-6));
}

TEST_CASE("phase currents sum to zero after any step", "[plant][property]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PlantState s;
    const PlantParams p{700e-6, 5e-3};
    for (int k = 0; k < 20000; ++k) {
        const Abc a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)}, r{u(rng) * 1e-2, u(rng) * 1e-2, 0.0};
        s = plant_step(s, a, b, 800.0, 1.0 / 22e3, p, r);
        CHECK(std::abs(s.i_abc[0] + s.i_abc[1] + s.i_abc[2]) < 1e-9);
    }
}

TEST_CASE("link energy identity holds step by step", "[plant][property]") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.2, 0.8);
    const PlantParams p{700e-6, 5e-3};
    const double dt = 1.0 / 22e3;
    PlantState s;
    double e_in = 0.0, e_r = 0.0;
    for (int k = 0; k < 5000; ++k) {
        const Abc a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)}, r{1e-3, 2e-3, 3e-3};
        s = plant_step(s, a, b, 800.0, dt, p, r);
        e_in += link_power(s) * dt;
        for (int ph = 0; ph < 3; ++ph) e_r += (p.link_resistance + r[ph]) * s.i_mid[ph] * s.i_mid[ph] * dt;
    }
    double e_l = 0.0;
    for (double i : s.i_abc) e_l += 0.5 * p.inductance * i * i;
    CHECK(std::abs(e_in - e_r - e_l) <= 1e-9 * std::max(1.0, e_in));
}

TEST_CASE("centre-aligned pole states reproduce the duty", "[plant]") {
    const Abc d{0.25, 0.5, 1.0};
    const int n = 64;
    Abc on{};
    for (int k = 0; k < n; ++k) {
        const auto st = pole_states(d, (k + 0.5) / n);
        for (int p = 0; p < 3; ++p) on[p] += st[p];
    }
    CHECK(on[0] / n == Approx(0.25));
    CHECK(on[1] / n == Approx(0.5));
    CHECK(on[2] / n == Approx(1.0));
    CHECK(pole_states({0, 0, 0}, 0.5)[0] == 1.0);  // zero-width pulse only at the exact centre
    CHECK(pole_states({0, 0, 0}, 0.49)[0] == 0.0);
}
