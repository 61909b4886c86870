#pragma once

// Two three-phase bridges on a shared DC bus joined phase-to-phase by series
// RL links. The star points are not connected, so the currents sum to zero.

#include "acpc/transforms.hpp"

namespace acpc {

struct PlantParams {
    double inductance = 700e-6;
    double link_resistance = 5e-3;
};

struct PlantState {
    Abc i_abc{0.0, 0.0, 0.0};
    /// Pole voltages to the negative rail, averaged over the last step.
    Abc v_test_abc{0.0, 0.0, 0.0};
    Abc v_load_abc{0.0, 0.0, 0.0};
    /// Mean current over the last step (trapezoidal midpoint).
    Abc i_mid{0.0, 0.0, 0.0};
    /// Common-mode voltage of the link star relative to the test star.
    double v_neutral = 0.0;
};

/// Integrates one step with the implicit trapezoidal rule. duty_* are the
/// pole duty ratios (averaged mode) or 0/1 pole states (switched mode).
/// r_extra adds per-phase series resistance (the conducting devices).
[[nodiscard]] PlantState plant_step(const PlantState& s, const Abc& duty_test, const Abc& duty_load, double v_dc,
                                    double dt, const PlantParams& p, const Abc& r_extra = {0.0, 0.0, 0.0}) noexcept;

/// Center-aligned carrier: the pole is high while |phase - 0.5| <= duty / 2,
/// phase being the position in the PWM period in [0, 1).
[[nodiscard]] Abc pole_states(const Abc& duty, double phase) noexcept;

/// Instantaneous power delivered into the links, sum of (v_test - v_load) * i.
[[nodiscard]] double link_power(const PlantState& s) noexcept;

}  // namespace acpc
