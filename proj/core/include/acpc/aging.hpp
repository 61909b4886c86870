#pragma once

// Cycle-driven degradation trajectories. Each mechanism follows a piecewise
// linear ramp, optional step events and an optional end-of-life knee; all
// three pieces are nondecreasing so the sum is too.

#include "acpc/device.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace acpc {

struct Knee {
    std::uint64_t start = 0;
    std::uint64_t end = 1;
    /// Extra amount reached at `end`, growing quadratically from `start`.
    double extra = 0.0;

    bool operator==(const Knee&) const = default;
};

struct MechanismTrajectory {
    /// (cycle, value) breakpoints with increasing cycle and nondecreasing value.
    /// Held flat after the last breakpoint; interpolated from zero at cycle 0.
    std::vector<std::pair<std::uint64_t, double>> ramp;
    /// (cycle, increment) jumps applied from that cycle on.
    std::vector<std::pair<std::uint64_t, double>> steps;
    std::optional<Knee> knee;

    [[nodiscard]] bool empty() const noexcept { return ramp.empty() && steps.empty() && !knee; }
    [[nodiscard]] double value_at(std::uint64_t cycle) const noexcept;

    bool operator==(const MechanismTrajectory&) const = default;
};

struct AgingTrajectory {
    MechanismTrajectory pkg;  ///< delta_pkg, fraction
    MechanismTrajectory vth;  ///< dv_th, V
    MechanismTrajectory vsd;  ///< dv_sd, V

    [[nodiscard]] bool empty() const noexcept { return pkg.empty() && vth.empty() && vsd.empty(); }

    bool operator==(const AgingTrajectory&) const = default;
};

/// Throws ConfigError if a mechanism is not monotone or dv_sd leaves [0, vsd_bound].
void check_trajectory(const AgingTrajectory& t, double vsd_bound = 0.7);

/// Moves each configured mechanism to its value at cycle_count; mechanisms
/// without a trajectory keep their current value.
[[nodiscard]] AgingState apply_aging(const AgingState& state, const AgingTrajectory& trajectory,
                                     std::uint64_t cycle_count);

/// Gate-oxide trajectory whose threshold shift takes the on-state voltage at
/// nominal current from its fresh value to v_ds_eol at cycle n_eol. The last
/// 30 % of life follows a knee.
[[nodiscard]] MechanismTrajectory default_gate_oxide_trajectory(const DeviceParams& p, std::uint64_t n_eol,
                                                               double v_ds_eol = 2.6);

/// Body-diode trajectory reaching 0.7 V at n_eol.
[[nodiscard]] MechanismTrajectory default_body_diode_trajectory(std::uint64_t n_eol, double dv_eol = 0.7);

}  // namespace acpc
