#pragma once

// Bench-level configuration shared by every module.
//
// Units are SI throughout (V, A, Hz, H, Ohm, s) except temperatures, which are
// degrees Celsius. Angles are radians internally; the scenario file accepts
// degrees and converts at the boundary.

#include "acpc/errors.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string_view>

namespace acpc {

enum class PfMode { Motor, Generator, Custom };
enum class Technique { FixedTimes, CaseSwing, JunctionSwing };
enum class PlantMode { Averaged, Switched };

[[nodiscard]] std::string_view to_string(PfMode m);
[[nodiscard]] std::string_view to_string(Technique t);
[[nodiscard]] std::string_view to_string(PlantMode m);

struct BenchConfig {
    double v_dc = 800.0;
    double f_sw = 22e3;
    double f_fund = 50.0;
    double modulation_index = 0.8;
    PfMode pf_mode = PfMode::Motor;
    /// theta_v - theta_i in radians; only read for PfMode::Custom.
    double pf_angle = 0.0;
    double i_ref_peak = 400.0;
    double link_inductance = 700e-6;
    double link_resistance = 5e-3;
    double dc_link_capacitance = 1.0e-3;
    double gate_on_v = 15.0;
    double gate_off_v = -4.0;
    double t_ambient = 25.0;

    Technique technique = Technique::FixedTimes;
    std::optional<double> t_on;
    std::optional<double> t_off;
    std::optional<double> t_case_max;
    std::optional<double> t_case_min;
    std::optional<double> t_j_max;
    std::optional<double> t_j_min;

    std::uint64_t n_cycles = 10;
    std::uint64_t rng_seed = 1;

    PlantMode plant_mode = PlantMode::Averaged;
    /// Integration steps per PWM period; 1 in averaged mode, 64 by default in switched mode.
    std::optional<int> steps_per_pwm;

    bool operator==(const BenchConfig&) const = default;
};

/// A BenchConfig that passed validate_scenario. Immutable.
class ValidatedConfig {
public:
    [[nodiscard]] const BenchConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] const BenchConfig* operator->() const noexcept { return &cfg_; }

    /// Fixed integration step of the run.
    [[nodiscard]] double dt() const noexcept { return 1.0 / (cfg_.f_sw * *cfg_.steps_per_pwm); }
    [[nodiscard]] int steps_per_pwm() const noexcept { return *cfg_.steps_per_pwm; }

    bool operator==(const ValidatedConfig&) const = default;

private:
    friend ValidatedConfig validate_scenario(const BenchConfig& cfg);
    explicit ValidatedConfig(BenchConfig c) : cfg_(std::move(c)) {}
    BenchConfig cfg_;
};

/// Checks ranges and technique-specific fields, fills defaults, and drops the
/// fields the selected technique does not use. Throws ConfigError.
[[nodiscard]] ValidatedConfig validate_scenario(const BenchConfig& cfg);

/// Position of the simulation on its fixed step grid.
struct SimTime {
    std::uint64_t step_index = 0;
    double dt = 0.0;
    /// Electrical angle in [0, 2*pi).
    double theta = 0.0;

    [[nodiscard]] double time() const noexcept { return static_cast<double>(step_index) * dt; }
};

/// Produces SimTime values without accumulating rounding in theta.
class SimClock {
public:
    SimClock(double dt, double f_fund) : dt_(dt), f_fund_(f_fund) {}

    [[nodiscard]] SimTime at(std::uint64_t step) const noexcept {
        const double turns = f_fund_ * dt_ * static_cast<double>(step);
        double frac = turns - std::floor(turns);
        if (frac >= 1.0) frac = 0.0;
        return {step, dt_, 2.0 * std::numbers::pi * frac};
    }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] double f_fund() const noexcept { return f_fund_; }

private:
    double dt_;
    double f_fund_;
};

/// Wraps an angle into [0, 2*pi).
[[nodiscard]] inline double wrap_2pi(double a) noexcept {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a < 0.0) a += two_pi;
    if (a >= two_pi) a = 0.0;
    return a;
}

/// Wraps an angle into [-pi, pi).
[[nodiscard]] inline double wrap_pi(double a) noexcept {
    constexpr double pi = std::numbers::pi;
    return wrap_2pi(a + pi) - pi;
}

[[nodiscard]] constexpr double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
[[nodiscard]] constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

}  // namespace acpc
