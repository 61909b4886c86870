#pragma once

// Current control of the back-to-back bench: the test inverter runs an
// open-loop voltage reference, the load inverter closes the dq current loops.

#include "acpc/config.hpp"
#include "acpc/transforms.hpp"

namespace acpc {

struct PiState {
    double kp = 0.0;
    double ki = 0.0;
    double integrator = 0.0;
    double out_min = -1e300;
    double out_max = 1e300;
};

/// One PI update. The integrator advances by ki*error*dt unless the output is
/// saturated and the error drives it further into saturation.
double pi_step(PiState& s, double error, double dt) noexcept;

/// Gains for a current loop on a series RL branch with crossover omega_bw.
/// kp = omega_bw * L; the PI zero sits a decade below crossover.
[[nodiscard]] PiState pi_for_rl(double inductance, double omega_bw, double limit) noexcept;

/// First-order discrete low-pass y += alpha * (x - y), one update per control period.
struct LowPass {
    double alpha = 1.0;

    [[nodiscard]] static LowPass from_cutoff(double f_c, double period) noexcept;
    /// Gain and phase lag (radians, >= 0) at frequency f.
    [[nodiscard]] double gain_at(double f, double period) const noexcept;
    [[nodiscard]] double lag_at(double f, double period) const noexcept;
};

struct ControlParams {
    double v_dc = 800.0;
    double f_fund = 50.0;
    double period = 1.0 / 22e3;  ///< control (PWM) period
    double modulation_index = 0.8;
    double inductance = 700e-6;
    double resistance = 5e-3;    ///< used only for the feedforward term
    double filter_cutoff = 2e3;
};

[[nodiscard]] ControlParams control_params(const ValidatedConfig& cfg);

struct ControllerState {
    ControlParams params;
    PiState pi_d;
    PiState pi_q;
    LowPass filter;
    Abc i_filtered{0.0, 0.0, 0.0};
    /// Filter correction at the fundamental, applied when parking the filtered currents.
    double filter_gain = 1.0;
    double filter_lag = 0.0;
    /// Last compensated dq measurement, kept for diagnostics.
    DqPair i_meas{};
    DqPair v_test{};
    DqPair v_load{};
};

/// Controller with default gains (current-loop bandwidth f_sw / 20).
[[nodiscard]] ControllerState make_controller(const ControlParams& p);

/// Resets integrators and filter state (converter restart).
void reset_controller(ControllerState& c) noexcept;

struct DutyCommand {
    Abc test{0.5, 0.5, 0.5};
    Abc load{0.5, 0.5, 0.5};
    bool saturated = false;
};

/// Current reference in dq for the given power-factor angle (theta_v - theta_i).
[[nodiscard]] DqPair current_reference(double i_peak, double pf_angle) noexcept;

/// One control period. theta is the electrical angle at the sampling instant;
/// duties are synthesized for the middle of the coming period.
DutyCommand control_step(const Abc& i_abc, const DqPair& i_ref, double theta, ControllerState& ctl,
                         bool enabled = true);

}  // namespace acpc
