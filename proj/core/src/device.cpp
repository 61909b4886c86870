#include "acpc/device.hpp"

#include <algorithm>
#include <cmath>

namespace acpc {

namespace {
constexpr double k_kelvin = 273.15;
}

void check_params(const DeviceParams& p) {
    if (!(p.r_drift0 > 0.0)) throw ConfigError("device.r_drift0", "must be positive");
    if (!(p.k_ch > 0.0)) throw ConfigError("device.k_ch", "must be positive");
    if (!(p.rho_vth < 0.0)) throw ConfigError("device.rho_vth", "must be negative");
    if (!(p.alpha_drift > 0.0)) throw ConfigError("device.alpha_drift", "must be positive");
    if (!(p.v_gs_on > p.v_th0)) throw ConfigError("device.v_gs_on", "must exceed v_th0");
    if (!(p.r_diode >= 0.0)) throw ConfigError("device.r_diode", "must be non-negative");
    if (!(p.i_nominal > 0.0)) throw ConfigError("device.i_nominal", "must be positive");
    if (!(p.v_ref_sw > 0.0 && p.i_ref_sw > 0.0)) throw ConfigError("device.v_ref_sw", "reference point must be positive");
    if (!(p.e_on0 >= 0.0 && p.e_off0 >= 0.0)) throw ConfigError("device.e_on0", "switching energies must be non-negative");
}

double v_th(const DeviceState& dev, double t_j) noexcept {
    const auto& p = dev.params;
    return p.v_th0 + p.rho_vth * (t_j - p.t0) + dev.aging.dv_th;
}

double overdrive(const DeviceState& dev, double t_j, double v_gs) noexcept { return v_gs - v_th(dev, t_j); }

double r_drift(const DeviceState& dev, double t_j) noexcept {
    const auto& p = dev.params;
    const double ratio = (t_j + k_kelvin) / (p.t0 + k_kelvin);
    return p.r_drift0 * (std::pow(ratio, p.alpha_drift) + dev.aging.delta_pkg);
}

double r_channel(const DeviceState& dev, double t_j, double v_gs) {
    const double od = overdrive(dev, t_j, v_gs);
    if (od <= 0.0) throw ChannelOff("gate voltage at or below threshold");
    return dev.params.k_ch / od;
}

RonTerms ron_terms(const DeviceState& dev, double t_j, double v_gs) {
    return {r_drift(dev, t_j) + r_channel(dev, t_j, v_gs), dev.params.rho_i, dev.params.i_nominal};
}

double r_on(const DeviceState& dev, double t_j, double i_d, double v_gs) {
    return ron_terms(dev, t_j, v_gs).at(i_d);
}

double v_sd(const DeviceState& dev, double i, double t_j) noexcept {
    const auto& p = dev.params;
    const double w = std::clamp(i / p.i_nominal, 0.0, 1.0);
    const double rho = p.rho_sd_lo + w * (p.rho_sd_hi - p.rho_sd_lo);
    return p.v_j0 + rho * (t_j - p.t0) + p.r_diode * i + dev.aging.dv_sd;
}

double conduction_voltage(const DeviceState& dev, double i, double t_j, double v_gs) {
    if (i == 0.0) return 0.0;
    const bool channel_on = overdrive(dev, t_j, v_gs) > 0.0;
    if (i > 0.0) {
        if (!channel_on) throw ChannelOff("forward current with the channel off");
        return i * r_on(dev, t_j, i, v_gs);
    }
    const double a = -i;
    if (!channel_on) return -v_sd(dev, a, t_j);

    // Channel and body diode in parallel: the diode takes current only once the
    // channel drop exceeds its knee.
    const double r = r_on(dev, t_j, a, v_gs);
    if (a * r <= v_sd(dev, 0.0, t_j)) return -a * r;
    double lo = 0.0, hi = a;
    for (int it = 0; it < 80; ++it) {
        const double i_diode = 0.5 * (lo + hi);
        if (v_sd(dev, i_diode, t_j) > (a - i_diode) * r) hi = i_diode;
        else lo = i_diode;
    }
    return -(a - 0.5 * (lo + hi)) * r;
}

double losses(const DeviceState& dev, double i, double t_j, double v_dc, double switching_rate,
              double conduction_duty, double v_gs) {
    const auto& p = dev.params;
    const double a = std::abs(i);
    double p_cond = 0.0;
    if (a > 0.0) {
        if (i < 0.0 && overdrive(dev, t_j, v_gs) <= 0.0) p_cond = v_sd(dev, a, t_j) * a * conduction_duty;
        else p_cond = i * i * r_on(dev, t_j, i, v_gs) * conduction_duty;
    }
    const double p_sw = switching_rate * (p.e_on0 + p.e_off0) * (v_dc / p.v_ref_sw) * (a / p.i_ref_sw);
    return p_cond + p_sw;
}

DeviceParams calibrate(const CalibrationTarget& t, DeviceParams base) {
    base.t0 = t.t0;
    base.v_th0 = t.v_th0;
    base.rho_vth = t.rho_vth;
    base.i_nominal = t.i_nominal;
    base.rho_i = t.rho_i;
    base.v_gs_on = t.v_gs;
    const double od = t.v_gs - t.v_th0;
    base.r_drift0 = t.drift_share * t.r0;
    base.k_ch = (1.0 - t.drift_share) * t.r0 * od;
    const double d_channel = base.k_ch * t.rho_vth / (od * od);
    base.alpha_drift = (t.sensitivity - d_channel) * (t.t0 + k_kelvin) / base.r_drift0;
    check_params(base);
    return base;
}

DeviceParams module_profile() {
    CalibrationTarget t;
    t.r0 = 1.58 / 400.0;
    t.rho_i = 0.5e-6;
    return calibrate(t);
}

DeviceParams vendor_a_profile() {
    CalibrationTarget t;
    t.r0 = 0.35;
    t.drift_share = 0.7;
    t.sensitivity = 2.4e-3;
    t.rho_vth = -6.4e-3;
    t.i_nominal = 20.0;
    DeviceParams base;
    base.v_j0 = 2.9;
    base.r_diode = 60e-3;
    base.e_on0 = 150e-6;
    base.e_off0 = 100e-6;
    base.i_ref_sw = 20.0;
    return calibrate(t, base);
}

DeviceParams vendor_b_profile() {
    CalibrationTarget t;
    t.r0 = 0.25;
    t.drift_share = 0.7;
    t.sensitivity = 1.6e-3;
    t.rho_vth = -3.1e-3;
    t.i_nominal = 20.0;
    DeviceParams base;
    base.v_j0 = 2.9;
    base.r_diode = 60e-3;
    base.e_on0 = 150e-6;
    base.e_off0 = 100e-6;
    base.i_ref_sw = 20.0;
    return calibrate(t, base);
}

double dv_th_for_vds(const DeviceParams& p, double v_ds_target) {
    DeviceState fresh{p, {}, p.t0};
    const double r_target = v_ds_target / p.i_nominal;
    const double r_rest = r_on(fresh, p.t0, p.i_nominal, p.v_gs_on) - r_channel(fresh, p.t0, p.v_gs_on);
    const double ch = r_target - r_rest;
    if (ch <= 0.0) throw ConfigError("v_ds_target", "below the non-channel part of the on-state drop");
    return (p.v_gs_on - p.v_th0) - p.k_ch / ch;
}

}  // namespace acpc
