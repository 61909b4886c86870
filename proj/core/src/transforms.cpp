#include "acpc/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace acpc {

namespace {
constexpr double k_shift = 2.0 * std::numbers::pi / 3.0;
}

DqPair park(const Abc& x, double theta) noexcept {
    const double ca = std::cos(theta), cb = std::cos(theta - k_shift), cc = std::cos(theta + k_shift);
    const double sa = std::sin(theta), sb = std::sin(theta - k_shift), sc = std::sin(theta + k_shift);
    return {(2.0 / 3.0) * (x[0] * ca + x[1] * cb + x[2] * cc),
            -(2.0 / 3.0) * (x[0] * sa + x[1] * sb + x[2] * sc)};
}

Abc inverse_park(const DqPair& x, double theta) noexcept {
    return {x.d * std::cos(theta) - x.q * std::sin(theta),
            x.d * std::cos(theta - k_shift) - x.q * std::sin(theta - k_shift),
            x.d * std::cos(theta + k_shift) - x.q * std::sin(theta + k_shift)};
}

Abc svpwm_from_abc(const Abc& v, double v_dc) noexcept {
    const auto [lo, hi] = std::minmax({v[0], v[1], v[2]});
    const double v0 = 0.5 * (hi + lo);
    Abc d{};
    for (int k = 0; k < 3; ++k) d[k] = std::clamp(0.5 + (v[k] - v0) / v_dc, 0.0, 1.0);
    return d;
}

SvpwmResult svpwm_duties(const DqPair& v_ref, double theta, double v_dc) noexcept {
    SvpwmResult r;
    DqPair v = v_ref;
    const double limit = v_dc / std::numbers::sqrt3;
    const double mag = std::hypot(v.d, v.q);
    if (mag > limit * (1.0 + 1e-12)) {
        v.d *= limit / mag;
        v.q *= limit / mag;
        r.saturated = true;
    }
    r.duty = svpwm_from_abc(inverse_park(v, theta), v_dc);
    return r;
}

}  // namespace acpc
