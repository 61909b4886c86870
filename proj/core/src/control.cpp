#include "acpc/control.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace acpc {

double pi_step(PiState& s, double error, double dt) noexcept {
    const double integ = s.integrator + s.ki * error * dt;
    const double raw = s.kp * error + integ;
    const bool push_high = raw > s.out_max && error > 0.0;
    const bool push_low = raw < s.out_min && error < 0.0;
    if (!push_high && !push_low) s.integrator = integ;
    return std::clamp(s.kp * error + s.integrator, s.out_min, s.out_max);
}

PiState pi_for_rl(double inductance, double omega_bw, double limit) noexcept {
    PiState s;
    s.kp = omega_bw * inductance;
    s.ki = s.kp * omega_bw / 10.0;
    s.out_min = -limit;
    s.out_max = limit;
    return s;
}

LowPass LowPass::from_cutoff(double f_c, double period) noexcept {
    return {1.0 - std::exp(-2.0 * std::numbers::pi * f_c * period)};
}

namespace {
std::complex<double> lowpass_response(double alpha, double f, double period) {
    const auto z_inv = std::polar(1.0, -2.0 * std::numbers::pi * f * period);
    return alpha / (1.0 - (1.0 - alpha) * z_inv);
}
}  // namespace

double LowPass::gain_at(double f, double period) const noexcept {
    return std::abs(lowpass_response(alpha, f, period));
}

double LowPass::lag_at(double f, double period) const noexcept {
    return -std::arg(lowpass_response(alpha, f, period));
}

ControlParams control_params(const ValidatedConfig& cfg) {
    ControlParams p;
    p.v_dc = cfg->v_dc;
    p.f_fund = cfg->f_fund;
    p.period = 1.0 / cfg->f_sw;
    p.modulation_index = cfg->modulation_index;
    p.inductance = cfg->link_inductance;
    p.resistance = cfg->link_resistance;
    return p;
}

ControllerState make_controller(const ControlParams& p) {
    ControllerState c;
    c.params = p;
    const double omega_bw = 2.0 * std::numbers::pi * (1.0 / p.period) / 20.0;
    const double limit = p.v_dc / std::numbers::sqrt3;
    c.pi_d = pi_for_rl(p.inductance, omega_bw, limit);
    c.pi_q = c.pi_d;
    c.filter = LowPass::from_cutoff(p.filter_cutoff, p.period);
    c.filter_gain = c.filter.gain_at(p.f_fund, p.period);
    c.filter_lag = c.filter.lag_at(p.f_fund, p.period);
    return c;
}

void reset_controller(ControllerState& c) noexcept {
    c.pi_d.integrator = 0.0;
    c.pi_q.integrator = 0.0;
    c.i_filtered = {0.0, 0.0, 0.0};
    c.i_meas = {};
    c.v_test = {};
    c.v_load = {};
}

DqPair current_reference(double i_peak, double pf_angle) noexcept {
    return {i_peak * std::cos(pf_angle), -i_peak * std::sin(pf_angle)};
}

DutyCommand control_step(const Abc& i_abc, const DqPair& i_ref, double theta, ControllerState& ctl,
                         bool enabled) {
    const auto& p = ctl.params;
    for (int k = 0; k < 3; ++k) ctl.i_filtered[k] += ctl.filter.alpha * (i_abc[k] - ctl.i_filtered[k]);

    DqPair i = park(ctl.i_filtered, theta - ctl.filter_lag);
    i.d /= ctl.filter_gain;
    i.q /= ctl.filter_gain;
    ctl.i_meas = i;

    DutyCommand cmd;
    if (!enabled) return cmd;

    const double omega = 2.0 * std::numbers::pi * p.f_fund;
    const double wl = omega * p.inductance;
    const DqPair ff{p.resistance * i_ref.d - wl * i_ref.q, p.resistance * i_ref.q + wl * i_ref.d};
    const DqPair u{ff.d + pi_step(ctl.pi_d, i_ref.d - i.d, p.period),
                   ff.q + pi_step(ctl.pi_q, i_ref.q - i.q, p.period)};

    ctl.v_test = {p.modulation_index * p.v_dc / std::numbers::sqrt3, 0.0};
    ctl.v_load = {ctl.v_test.d - u.d, ctl.v_test.q - u.q};

    const double theta_mod = theta + 0.5 * omega * p.period;
    const auto t = svpwm_duties(ctl.v_test, theta_mod, p.v_dc);
    const auto l = svpwm_duties(ctl.v_load, theta_mod, p.v_dc);
    cmd.test = t.duty;
    cmd.load = l.duty;
    cmd.saturated = t.saturated || l.saturated;
    return cmd;
}

}  // namespace acpc
