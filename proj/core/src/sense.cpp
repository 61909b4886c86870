#include "acpc/sense.hpp"

#include <algorithm>
#include <cmath>

namespace acpc {

void check_sense(const SenseCircuitParams& p) {
    if (!(p.r_a1 > 0.0 && p.r_a2 > 0.0)) throw ConfigError("sense.r_a1", "divider resistors must be positive");
    if (p.adc_bits < 8 || p.adc_bits > 16) throw ConfigError("sense.adc_bits", "must lie in [8, 16]");
    if (!(p.adc_fullscale > 0.0)) throw ConfigError("sense.adc_fullscale", "must be positive");
    if (!(p.shift_gain > 0.0)) throw ConfigError("sense.shift_gain", "must be positive");
    if (!(p.i_desat > 0.0 && p.i_desat_vth > 0.0)) throw ConfigError("sense.i_desat", "must be positive");
    if (!(p.rc_filter_tau >= 0.0)) throw ConfigError("sense.rc_filter_tau", "must be non-negative");
    if (!(p.noise_sigma >= 0.0)) throw ConfigError("sense.noise_sigma", "must be non-negative");
    if (!(p.c_gs > 0.0)) throw ConfigError("sense.c_gs", "must be positive");
    if (!(p.vth_slope > 0.0)) throw ConfigError("sense.vth_slope", "must be positive");
}

namespace {
double adc_levels(int bits) { return std::ldexp(1.0, bits) - 1.0; }
}  // namespace

int adc_quantize(double v_op1, const SenseCircuitParams& p) noexcept {
    const double levels = adc_levels(p.adc_bits);
    const double x = (p.shift_gain * v_op1 + p.shift_offset) / p.adc_fullscale * levels;
    return static_cast<int>(std::lround(std::clamp(x, 0.0, levels)));
}

double adc_dequantize(int code, const SenseCircuitParams& p) noexcept {
    const double v_adc = static_cast<double>(code) / adc_levels(p.adc_bits) * p.adc_fullscale;
    return (v_adc - p.shift_offset) / p.shift_gain;
}

double draw_e_d(std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(0.3e-3, 1.6e-3)(rng);
}

SenseReading SenseChannel::sense_vds(double v_ds_true, bool sw_on, double dt) {
    SenseReading r;
    if (!sw_on) {
        primed_ = false;
        return r;
    }
    const double target = v_ds_true + params_.e_d;
    if (!primed_ || params_.rc_filter_tau <= 0.0) {
        lag_ = target;
        primed_ = true;
    } else {
        lag_ += (target - lag_) * (1.0 - std::exp(-dt / params_.rc_filter_tau));
    }
    r.valid = true;
    r.v_op1 = lag_;
    if (params_.noise_sigma > 0.0) r.v_op1 += params_.noise_sigma * noise_(rng_);
    r.adc_code = adc_quantize(r.v_op1, params_);
    return r;
}

double sense_vsd(double i_reverse, const DeviceState& dev, double t_j, double v_gs, const SenseCircuitParams& p) {
    if (!(i_reverse > 0.0)) throw NotThirdQuadrant("body-diode reading needs reverse current");
    if (overdrive(dev, t_j, v_gs) > 0.0) throw NotThirdQuadrant("channel is on and shunts the body diode");
    return -conduction_voltage(dev, -i_reverse, t_j, v_gs) + p.e_d;
}

VthTrace measure_vth_trace(const DeviceState& dev, double t_ambient, const SenseCircuitParams& p, bool gate_open) {
    const double i_bias = p.i_desat_vth;
    const double vth = v_th(dev, t_ambient);
    const double h = 1e-6;
    double v = 0.0, t = 0.0;
    std::optional<double> t_on;

    // Implicit Euler on C dv/dt = I - I exp((v - v_th) / s); Newton per step.
    while (true) {
        double x = v;
        for (int it = 0; it < 50; ++it) {
            const double ich = gate_open ? 0.0 : i_bias * std::exp((x - vth) / p.vth_slope);
            const double f = x - v - h / p.c_gs * (i_bias - ich);
            const double df = 1.0 + h / p.c_gs * ich / p.vth_slope;
            const double dx = f / df;
            x -= dx;
            if (std::abs(dx) < 1e-13) break;
        }
        v = std::min(x, p.vth_compliance);
        t += h;
        const double ich = gate_open ? 0.0 : i_bias * std::exp((v - vth) / p.vth_slope);
        if (!t_on && ich >= 0.5 * i_bias) t_on = t;
        if (t_on && t - *t_on >= p.vth_blanking) break;
        if (t > p.vth_timeout) throw Timeout("gate never reached conduction in threshold-voltage mode");
    }

    const double levels = adc_levels(p.adc_bits);
    const double x = std::clamp((p.vth_shift_gain * v + p.vth_shift_offset) / p.adc_fullscale * levels, 0.0, levels);
    const double code = std::round(x);
    const double value = (code / levels * p.adc_fullscale - p.vth_shift_offset) / p.vth_shift_gain;
    return {value, *t_on, v};
}

double measure_vth(const DeviceState& dev, double t_ambient, const SenseCircuitParams& p, bool gate_open) {
    return measure_vth_trace(dev, t_ambient, p, gate_open).value;
}

DesatDecision desat_check(const DesatConfig& cfg, const std::vector<DesatSample>& series) noexcept {
    DesatMonitor m;
    for (const auto& s : series) {
        if (m.update(cfg, s.t, s.v)) return {true, s.t};
    }
    return {};
}

bool DesatMonitor::update(const DesatConfig& cfg, double t, double v) noexcept {
    if (!(v > cfg.threshold)) {
        since_.reset();
        return false;
    }
    if (!since_) since_ = t;
    return t - *since_ >= cfg.blanking;
}

DesatConfig compensate_desat_threshold(const DesatConfig& cfg, double dv_th_measured, const DeviceState& dev,
                                       double margin) {
    const auto& p = dev.params;
    const double od0 = p.v_gs_on - p.v_th0;
    const double od = od0 - dv_th_measured;
    if (od <= margin) throw OverdriveCollapse("threshold shift leaves no gate overdrive");
    DesatConfig out = cfg;
    out.threshold += p.i_nominal * (p.k_ch / od - p.k_ch / od0);
    out.compensated = true;
    return out;
}

MovVerdict mov_check(const MovSpec& mov, const MovBench& b) noexcept {
    MovVerdict v;
    v.steady_rating_ok = mov.v_steady > b.v_dc;
    v.clamp_ok = mov.v_clamp < b.v_module_max;
    v.energy_required = 3.0 * 0.5 * b.inductance * b.i_peak * b.i_peak +
                        0.5 * b.c_dc * (mov.v_clamp * mov.v_clamp - b.v_dc * b.v_dc);
    v.energy_ok = mov.e_rating >= v.energy_required;
    return v;
}

}  // namespace acpc
