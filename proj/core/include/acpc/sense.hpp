#pragma once

// Measurement front end built around the gate driver's DESAT pin: on-state
// voltage sensing through the high-voltage blocking diodes, the two-mode
// threshold-voltage measurement, DESAT protection and MOV sizing rules.

#include "acpc/device.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace acpc {

struct SenseCircuitParams {
    double i_desat = 1e-3;          ///< A, bias in V_DS measurement mode
    double i_desat_vth = 2e-3;      ///< A, bias in threshold-voltage mode
    double r_s = 1e3;               ///< ohm, series resistor
    double r_a1 = 10e3;             ///< ohm, divider of the difference stage
    double r_a2 = 10e3;
    double e_d = 1e-3;              ///< V, residual diode mismatch of this channel
    double v_d_hv = 0.7;            ///< V per high-voltage blocking diode
    double rc_filter_tau = 0.5e-6;  ///< s
    double shift_offset = 2.5;      ///< V
    double shift_gain = 0.5;
    int adc_bits = 12;
    double adc_fullscale = 5.0;     ///< V
    double noise_sigma = 2e-3;      ///< V on v_op1

    double c_gs = 10e-9;            ///< F, gate capacitance charged in threshold mode
    double vth_blanking = 2e-3;     ///< s
    double vth_slope = 0.1;         ///< V per e-fold of sub-threshold current
    double vth_compliance = 20.0;   ///< V, supply limit of the bias source
    double vth_timeout = 10e-3;     ///< s
    double vth_shift_gain = 0.2;    ///< level shift of the threshold-mode ADC channel
    double vth_shift_offset = 0.5;

    bool operator==(const SenseCircuitParams&) const = default;
};

/// Throws ConfigError on invalid circuit constants.
void check_sense(const SenseCircuitParams& p);

struct SenseReading {
    bool valid = false;
    double v_op1 = 0.0;
    int adc_code = 0;
};

[[nodiscard]] int adc_quantize(double v_op1, const SenseCircuitParams& p) noexcept;
[[nodiscard]] double adc_dequantize(int code, const SenseCircuitParams& p) noexcept;

/// Draws a per-channel diode mismatch uniformly from [0.3, 1.6] mV.
[[nodiscard]] double draw_e_d(std::mt19937_64& rng);

/// Stateful sensing channel of one switch: RC lag and seeded noise.
class SenseChannel {
public:
    SenseChannel() = default;
    SenseChannel(SenseCircuitParams p, std::uint64_t seed) : params_(p), rng_(seed) {}

    [[nodiscard]] const SenseCircuitParams& params() const noexcept { return params_; }
    SenseCircuitParams& params() noexcept { return params_; }

    /// Forgets the RC state (the diodes were blocking).
    void reset() noexcept { primed_ = false; }

    /// v_op1 = lagged (v_ds_true + e_d) plus noise while the switch is on.
    SenseReading sense_vds(double v_ds_true, bool sw_on, double dt);

private:
    SenseCircuitParams params_;
    std::mt19937_64 rng_{1};
    std::normal_distribution<double> noise_{0.0, 1.0};
    double lag_ = 0.0;
    bool primed_ = false;
};

/// Body-diode voltage seen through the sensing path, v_sd + e_d.
/// Throws NotThirdQuadrant if the channel is on or the current is not reverse.
[[nodiscard]] double sense_vsd(double i_reverse, const DeviceState& dev, double t_j, double v_gs,
                               const SenseCircuitParams& p);

struct VthTrace {
    double value = 0.0;           ///< returned (quantized) gate voltage
    double t_conduction = 0.0;    ///< s until the channel carried the bias current
    double v_settled = 0.0;       ///< unquantized gate voltage at the end
};

/// Threshold voltage by charging the gate with the 2 mA source until the
/// diode-connected channel takes the current, then waiting the blanking time.
/// Throws Timeout if conduction is never reached.
VthTrace measure_vth_trace(const DeviceState& dev, double t_ambient, const SenseCircuitParams& p,
                           bool gate_open = false);

[[nodiscard]] double measure_vth(const DeviceState& dev, double t_ambient, const SenseCircuitParams& p,
                                 bool gate_open = false);

/// Voltage at the DESAT pin with the switch on.
[[nodiscard]] constexpr double desat_voltage(const SenseCircuitParams& p, double v_ds) noexcept {
    return p.i_desat * p.r_s + 2.0 * p.v_d_hv + v_ds;
}

struct DesatConfig {
    double threshold = 9.0;  ///< V
    double blanking = 2e-6;  ///< s
    bool compensated = false;

    bool operator==(const DesatConfig&) const = default;
};

struct DesatSample {
    double t = 0.0;
    double v = 0.0;
};

struct DesatDecision {
    bool tripped = false;
    double trip_time = 0.0;
};

[[nodiscard]] DesatDecision desat_check(const DesatConfig& cfg, const std::vector<DesatSample>& series) noexcept;

/// Incremental form of desat_check for the running bench.
class DesatMonitor {
public:
    /// Returns true on the sample that completes the blanking time.
    bool update(const DesatConfig& cfg, double t, double v) noexcept;
    void reset() noexcept { since_.reset(); }

private:
    std::optional<double> since_;
};

/// Raises the threshold by the on-state voltage increase at nominal current
/// predicted from the measured threshold shift. Throws OverdriveCollapse if the
/// remaining overdrive is at or below margin.
[[nodiscard]] DesatConfig compensate_desat_threshold(const DesatConfig& cfg, double dv_th_measured,
                                                     const DeviceState& dev, double margin = 1.0);

struct MovSpec {
    double v_steady = 0.0;
    double v_clamp = 0.0;
    double e_rating = 0.0;
};

struct MovBench {
    double v_dc = 800.0;
    double v_module_max = 1200.0;
    double inductance = 700e-6;
    double i_peak = 400.0;
    double c_dc = 0.0;
};

struct MovVerdict {
    bool steady_rating_ok = false;
    bool clamp_ok = false;
    bool energy_ok = false;
    double energy_required = 0.0;

    [[nodiscard]] bool pass() const noexcept { return steady_rating_ok && clamp_ok && energy_ok; }
};

[[nodiscard]] MovVerdict mov_check(const MovSpec& mov, const MovBench& bench) noexcept;

}  // namespace acpc
