#include "acpc/aging.hpp"

#include <algorithm>
#include <string>

namespace acpc {

double MechanismTrajectory::value_at(std::uint64_t cycle) const noexcept {
    double v = 0.0;
    if (!ramp.empty()) {
        if (cycle >= ramp.back().first) {
            v = ramp.back().second;
        } else {
            std::uint64_t c0 = 0;
            double v0 = 0.0;
            for (const auto& [c1, v1] : ramp) {
                if (cycle < c1) {
                    const double w = static_cast<double>(cycle - c0) / static_cast<double>(c1 - c0);
                    v = v0 + w * (v1 - v0);
                    break;
                }
                c0 = c1;
                v0 = v1;
            }
        }
    }
    for (const auto& [c, dv] : steps) {
        if (cycle >= c) v += dv;
    }
    if (knee && cycle > knee->start) {
        const double span = static_cast<double>(knee->end - knee->start);
        const double x = std::min(static_cast<double>(cycle - knee->start) / span, 1.0);
        v += knee->extra * x * x;
    }
    return v;
}

namespace {

void check_mechanism(const MechanismTrajectory& m, const std::string& name) {
    double prev = 0.0;
    for (std::size_t k = 0; k < m.ramp.size(); ++k) {
        const auto [c, v] = m.ramp[k];
        if (k > 0 && c <= m.ramp[k - 1].first) throw ConfigError(name, "ramp cycles must increase");
        if (v < 0.0) throw ConfigError(name, "ramp values must be non-negative");
        if (v < prev) throw ConfigError(name, "ramp values must be nondecreasing");
        prev = v;
    }
    for (const auto& [c, dv] : m.steps) {
        if (dv < 0.0) throw ConfigError(name, "step increments must be non-negative");
    }
    if (m.knee) {
        if (m.knee->end <= m.knee->start) throw ConfigError(name, "knee end must follow its start");
        if (m.knee->extra < 0.0) throw ConfigError(name, "knee amount must be non-negative");
    }
}

double max_value(const MechanismTrajectory& m) {
    double v = m.ramp.empty() ? 0.0 : m.ramp.back().second;
    for (const auto& s : m.steps) v += s.second;
    if (m.knee) v += m.knee->extra;
    return v;
}

}  // namespace

void check_trajectory(const AgingTrajectory& t, double vsd_bound) {
    check_mechanism(t.pkg, "aging.pkg");
    check_mechanism(t.vth, "aging.vth");
    check_mechanism(t.vsd, "aging.vsd");
    if (max_value(t.vsd) > vsd_bound + 1e-12) throw ConfigError("aging.vsd", "exceeds the body-diode shift bound");
}

AgingState apply_aging(const AgingState& state, const AgingTrajectory& trajectory, std::uint64_t cycle_count) {
    if (cycle_count < state.cycles_accumulated) throw Error("apply_aging: cycle count moved backwards");
    AgingState n = state;
    if (!trajectory.pkg.empty()) n.delta_pkg = std::max(state.delta_pkg, trajectory.pkg.value_at(cycle_count));
    if (!trajectory.vth.empty()) n.dv_th = std::max(state.dv_th, trajectory.vth.value_at(cycle_count));
    if (!trajectory.vsd.empty()) n.dv_sd = std::max(state.dv_sd, trajectory.vsd.value_at(cycle_count));
    n.cycles_accumulated = cycle_count;
    return n;
}

MechanismTrajectory default_gate_oxide_trajectory(const DeviceParams& p, std::uint64_t n_eol, double v_ds_eol) {
    const double total = dv_th_for_vds(p, v_ds_eol);
    const std::uint64_t knee_start = n_eol * 7 / 10;
    MechanismTrajectory m;
    m.ramp = {{knee_start, 0.3 * total}};
    m.knee = Knee{knee_start, n_eol, 0.7 * total};
    return m;
}

MechanismTrajectory default_body_diode_trajectory(std::uint64_t n_eol, double dv_eol) {
    MechanismTrajectory m;
    m.ramp = {{n_eol, dv_eol}};
    return m;
}

}  // namespace acpc
