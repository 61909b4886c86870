#include "acpc/plant.hpp"

#include <cmath>

namespace acpc {

PlantState plant_step(const PlantState& s, const Abc& duty_test, const Abc& duty_load, double v_dc, double dt,
                      const PlantParams& p, const Abc& r_extra) noexcept {
    PlantState n;
    const double h = dt / p.inductance;
    Abc base{}, slope{};
    double sum_base = 0.0, sum_slope = 0.0;
    for (int k = 0; k < 3; ++k) {
        n.v_test_abc[k] = duty_test[k] * v_dc;
        n.v_load_abc[k] = duty_load[k] * v_dc;
        const double a = 0.5 * (p.link_resistance + r_extra[k]) * h;
        const double u = n.v_test_abc[k] - n.v_load_abc[k];
        // i_new = base - slope * v_n
        base[k] = (s.i_abc[k] * (1.0 - a) + h * u) / (1.0 + a);
        slope[k] = h / (1.0 + a);
        sum_base += base[k];
        sum_slope += slope[k];
    }
    n.v_neutral = sum_base / sum_slope;
    for (int k = 0; k < 3; ++k) {
        n.i_abc[k] = base[k] - slope[k] * n.v_neutral;
        n.i_mid[k] = 0.5 * (s.i_abc[k] + n.i_abc[k]);
    }
    // Remove the rounding residue so the zero-sum constraint holds exactly.
    const double residue = (n.i_abc[0] + n.i_abc[1] + n.i_abc[2]) / 3.0;
    for (auto& i : n.i_abc) i -= residue;
    return n;
}

Abc pole_states(const Abc& duty, double phase) noexcept {
    Abc out{};
    for (int k = 0; k < 3; ++k) out[k] = std::abs(phase - 0.5) <= 0.5 * duty[k] ? 1.0 : 0.0;
    return out;
}

double link_power(const PlantState& s) noexcept {
    double p = 0.0;
    for (int k = 0; k < 3; ++k) p += (s.v_test_abc[k] - s.v_load_abc[k]) * s.i_mid[k];
    return p;
}

}  // namespace acpc
