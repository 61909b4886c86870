#pragma once

#include <array>

namespace acpc {

/// Quantity in the rotating dq frame (amperes or volts).
struct DqPair {
    double d = 0.0;
    double q = 0.0;

    bool operator==(const DqPair&) const = default;
};

using Abc = std::array<double, 3>;

/// Amplitude-invariant Park transform, q leading d by 90 degrees.
/// A balanced set lagging theta by phi, a = I cos(theta - phi), maps to
/// (I cos phi, -I sin phi).
[[nodiscard]] DqPair park(const Abc& x, double theta) noexcept;

[[nodiscard]] Abc inverse_park(const DqPair& x, double theta) noexcept;

struct SvpwmResult {
    Abc duty{0.5, 0.5, 0.5};
    bool saturated = false;
};

/// Center-aligned space-vector duties (min-max zero-sequence injection).
/// References outside the hexagon's inscribed circle are clamped radially.
[[nodiscard]] SvpwmResult svpwm_duties(const DqPair& v_ref, double theta, double v_dc) noexcept;

/// Duties for a stationary-frame abc reference already inside the linear range.
[[nodiscard]] Abc svpwm_from_abc(const Abc& v, double v_dc) noexcept;

}  // namespace acpc
