#pragma once

// SiC MOSFET conduction model.
//
// On-resistance is split into a drift part with positive temperature
// coefficient and a channel part k_ch / (v_gs - v_th) whose coefficient is
// negative because v_th falls with temperature. Package degradation adds a
// temperature-independent series resistance; gate-oxide degradation shifts
// v_th and so acts through the channel overdrive.

#include "acpc/errors.hpp"

#include <cstdint>

namespace acpc {

struct DeviceParams {
    double r_drift0 = 1.975e-3;   ///< ohm at t0
    double alpha_drift = 1.97;    ///< drift temperature exponent
    double k_ch = 24.29e-3;       ///< V*ohm
    double v_th0 = 2.7;           ///< V at t0
    double rho_vth = -6.4e-3;     ///< V/C
    double v_j0 = 2.8;            ///< body-diode knee, V
    double rho_sd_lo = -2.65e-3;  ///< V/C at low current
    double rho_sd_hi = -4.8e-3;   ///< V/C at and above i_nominal
    double r_diode = 3.0e-3;      ///< ohm
    double e_on0 = 2.5e-3;        ///< J per turn-on at (v_ref_sw, i_ref_sw)
    double e_off0 = 1.5e-3;       ///< J per turn-off at (v_ref_sw, i_ref_sw)
    double v_ref_sw = 800.0;
    double i_ref_sw = 400.0;
    double t0 = 25.0;
    double i_nominal = 400.0;
    double rho_i = 0.5e-6;        ///< ohm/A around i_nominal
    double v_gs_on = 15.0;        ///< gate drive used for calibration and DESAT compensation

    bool operator==(const DeviceParams&) const = default;
};

/// Throws ConfigError when the parameter set violates its invariants.
void check_params(const DeviceParams& p);

struct AgingState {
    double delta_pkg = 0.0;  ///< package resistance increase, fraction of r_drift0
    double dv_th = 0.0;      ///< V
    double dv_sd = 0.0;      ///< V
    std::uint64_t cycles_accumulated = 0;

    bool operator==(const AgingState&) const = default;
};

struct DeviceState {
    DeviceParams params;
    AgingState aging;
    double t_j = 25.0;
};

[[nodiscard]] double v_th(const DeviceState& dev, double t_j) noexcept;

/// Overdrive v_gs - v_th at t_j.
[[nodiscard]] double overdrive(const DeviceState& dev, double t_j, double v_gs) noexcept;

/// Channel-on resistance. Throws ChannelOff if v_gs <= v_th.
[[nodiscard]] double r_on(const DeviceState& dev, double t_j, double i_d, double v_gs);

/// Drift part of r_on including package aging; the rest is channel and current terms.
[[nodiscard]] double r_drift(const DeviceState& dev, double t_j) noexcept;
[[nodiscard]] double r_channel(const DeviceState& dev, double t_j, double v_gs);

/// Body-diode forward drop for forward current i > 0.
[[nodiscard]] double v_sd(const DeviceState& dev, double i, double t_j) noexcept;

/// Signed drain-source voltage for signed drain current i.
[[nodiscard]] double conduction_voltage(const DeviceState& dev, double i, double t_j, double v_gs);

/// Conduction plus switching loss in watts. switching_rate is switching events
/// (on/off pairs) per second, conduction_duty the fraction of time conducting.
[[nodiscard]] double losses(const DeviceState& dev, double i, double t_j, double v_dc, double switching_rate,
                            double conduction_duty, double v_gs);

/// Temperature-only factors of r_on, for callers that evaluate it at many
/// currents for a fixed junction temperature.
struct RonTerms {
    double fixed = 0.0;  ///< drift + package + channel at t_j, ohm
    double rho_i = 0.0;
    double i_nominal = 0.0;

    [[nodiscard]] double at(double i_d) const noexcept {
        const double a = i_d < 0.0 ? -i_d : i_d;
        return fixed + rho_i * (a - i_nominal);
    }
};

[[nodiscard]] RonTerms ron_terms(const DeviceState& dev, double t_j, double v_gs);

/// Parameter set whose on-resistance equals r0 at (t0, i_nominal, v_gs) with the
/// drift carrying drift_share of it and a net dR/dT of sensitivity at t0.
struct CalibrationTarget {
    double r0 = 3.95e-3;
    double drift_share = 0.5;
    double sensitivity = 12e-6;  ///< ohm/C at t0
    double v_th0 = 2.7;
    double rho_vth = -6.4e-3;
    double v_gs = 15.0;
    double t0 = 25.0;
    double i_nominal = 400.0;
    double rho_i = 0.0;
};

[[nodiscard]] DeviceParams calibrate(const CalibrationTarget& target, DeviceParams base = {});

/// 400 A module profile: 1.58 V at nominal current, 12 uOhm/C.
[[nodiscard]] DeviceParams module_profile();
/// Discrete-device profiles carrying the vendor A and vendor B sensitivities.
[[nodiscard]] DeviceParams vendor_a_profile();
[[nodiscard]] DeviceParams vendor_b_profile();

/// Threshold shift that moves the on-state voltage at i_nominal to v_ds_target.
[[nodiscard]] double dv_th_for_vds(const DeviceParams& p, double v_ds_target);

}  // namespace acpc
