#pragma once

// The complete bench: two inverters, twelve switches with their thermal
// networks, sensing channels and samplers, stepped on one fixed time grid.
//
// Device numbering: id = inverter * 6 + phase * 2 + (lower ? 1 : 0), inverter 0
// being the inverter under test. A positive phase current flows from the test
// inverter through the link into the load inverter.

#include "acpc/aging.hpp"
#include "acpc/config.hpp"
#include "acpc/control.hpp"
#include "acpc/device.hpp"
#include "acpc/lut.hpp"
#include "acpc/plant.hpp"
#include "acpc/sampler.hpp"
#include "acpc/sense.hpp"
#include "acpc/thermal.hpp"

#include <array>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

namespace acpc {

inline constexpr int k_devices = 12;
inline constexpr int k_iut_devices = 6;

struct SamplerParams {
    int n = 300;
    double window = std::numbers::pi / 18.0;  ///< rad, half width (10 degrees)
    int budget = 5;
    CaptureMode mode = CaptureMode::OutOfOrder;
    int fir_taps = 31;
    double fir_cutoff = 0.1;
    double i_floor = 5.0;        ///< A
    int settle_cycles = 2;       ///< fundamental cycles after a converter change
    double min_capture_duty = 0.1;

    bool operator==(const SamplerParams&) const = default;
};

struct WarningPolicy {
    double r_on_rel_threshold = 0.05;
    double v_th_shift_threshold = 0.5;
    double v_sd_shift_threshold = 0.1;

    bool operator==(const WarningPolicy&) const = default;
};

struct StartupParams {
    /// Cycles between start-up measurements; 0 runs them only before cycle 0.
    std::uint64_t interval = 100;
    /// Calibration current of the ambient on-resistance pulse; 0 means i_ref_peak.
    double i_cal = 0.0;
    int readings = 64;
    /// Largest junction excess over ambient accepted before measuring, C.
    double cooldown_tolerance = 0.5;
    /// Reverse current of the body-diode reading, A.
    double i_vsd = 1.0;

    bool operator==(const StartupParams&) const = default;
};

struct ThermalParams {
    std::vector<FosterStage> stages{{0.02, 0.05}, {0.06, 0.5}, {0.15, 10.0 / 3.0}, {0.2, 25.0}};
    double r_th_aging_factor = 1.0;
    double ntc_bias = 0.0;
    double ntc_tau = 0.5;
    CoolingState cooling;

    bool operator==(const ThermalParams&) const = default;
};

/// Everything a run needs besides the runtime state.
struct Scenario {
    BenchConfig bench;
    DeviceParams device = module_profile();
    ThermalParams thermal;
    AgingTrajectory aging;
    SenseCircuitParams sense;
    DesatConfig desat;
    SamplerParams sampler;
    WarningPolicy warnings;
    StartupParams startup;
    /// Converter current while cooling under the junction-swing technique, A.
    double sense_current = 150.0;
    double overcurrent_factor = 2.0;
    double t_j_limit = 200.0;
    /// Thermal-only step multiple while the converter is off.
    int idle_step_factor = 5;
    /// Longest heating or cooling phase before the run is abandoned, s.
    double max_phase_time = 600.0;
    /// Steps between waveform rows.
    int waveform_decimation = 22;

    bool operator==(const Scenario&) const = default;
};

class ValidatedScenario {
public:
    [[nodiscard]] const Scenario& scenario() const noexcept { return s_; }
    [[nodiscard]] const ValidatedConfig& config() const noexcept { return cfg_; }

private:
    friend ValidatedScenario validate(const Scenario& s);
    ValidatedScenario(Scenario s, ValidatedConfig c) : s_(std::move(s)), cfg_(std::move(c)) {}
    Scenario s_;
    ValidatedConfig cfg_;
};

/// validate_scenario on the bench part plus checks of every module's parameters.
[[nodiscard]] ValidatedScenario validate(const Scenario& s);

struct DeviceInfo {
    int inverter = 0;  ///< 0 = under test, 1 = load
    int phase = 0;
    bool lower = false;
    double sign = 1.0;  ///< device current = sign * phase current
};

[[nodiscard]] constexpr DeviceInfo device_info(int id) noexcept {
    const int inv = id / 6, phase = (id % 6) / 2;
    const bool lower = (id % 2) == 1;
    const double sign = (inv == 0) == !lower ? 1.0 : -1.0;
    return {inv, phase, lower, sign};
}

struct EnergyTelemetry {
    double e_supply = 0.0;        ///< J drawn from the DC supply
    double e_device_loss = 0.0;   ///< J dissipated in the twelve switches
    double e_link_loss = 0.0;     ///< J dissipated in the link resistances
    double e_inductor0 = 0.0;     ///< J stored in the links at the start
    double e_inductor = 0.0;      ///< J stored now
    double e_circulated = 0.0;    ///< J of apparent power handled by the test inverter
    double time = 0.0;            ///< s of converter operation covered
};

struct WindowEvent {
    int device = 0;
    double time = 0.0;
    RonEstimate estimate;
    double r_on_true = 0.0;  ///< model value at the center slot's capture
    double t_j_true = 0.0;
    double t_j_estimate = 0.0;
    bool out_of_grid = false;
};

struct WaveformRow {
    double time = 0.0;
    double theta = 0.0;
    Abc i_abc{};
    std::array<double, k_devices> v_ds{};
    std::array<double, k_devices> t_j{};
};

struct StartupResult {
    std::array<double, k_devices> v_th{};
    std::array<double, k_devices> dv_th{};
    std::array<double, k_devices> r_on_ambient{};
    std::array<double, k_devices> v_sd{};
};

class Bench {
public:
    explicit Bench(const ValidatedScenario& vs);

    [[nodiscard]] const Scenario& scenario() const noexcept { return sc_; }
    [[nodiscard]] const ValidatedConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] double time() const noexcept { return static_cast<double>(ticks_) * dt_; }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] double theta() const noexcept { return clock_.at(ticks_).theta; }

    [[nodiscard]] const std::array<DeviceState, k_devices>& devices() const noexcept { return dev_; }
    [[nodiscard]] std::array<DeviceState, k_devices>& devices() noexcept { return dev_; }
    [[nodiscard]] const FosterNetwork& network(int d) const { return net_.at(d); }
    [[nodiscard]] FosterNetwork& network(int d) { return net_.at(d); }
    [[nodiscard]] double t_j(int d) const { return t_j_.at(d); }
    [[nodiscard]] double t_case(int d) const { return t_case_.at(d); }
    [[nodiscard]] double ntc_reading(int d) const { return ntc_val_.at(d); }
    [[nodiscard]] const CoolingState& cooling(int inverter) const { return cool_.at(inverter); }
    [[nodiscard]] const PlantState& plant() const noexcept { return plant_; }
    [[nodiscard]] const ControllerState& controller() const noexcept { return ctl_; }
    [[nodiscard]] const DutyCommand& duties() const noexcept { return cmd_; }
    [[nodiscard]] const EnergyTelemetry& energy() const noexcept { return energy_; }
    [[nodiscard]] const RonLut& lut(int d) const { return lut_.at(d); }
    [[nodiscard]] const RonLut& fresh_lut() const noexcept { return fresh_lut_; }
    [[nodiscard]] const DesatConfig& desat(int d) const { return desat_.at(d); }
    [[nodiscard]] const SamplerState& sampler(int d) const { return samplers_.at(d); }
    [[nodiscard]] const TriggerSet& triggers(int d) const { return triggers_.at(d); }
    [[nodiscard]] const std::optional<SamplerState>& last_window(int d) const { return last_window_.at(d); }
    [[nodiscard]] const std::vector<double>& taps() const noexcept { return taps_; }
    [[nodiscard]] double e_d(int d) const { return sense_.at(d).params().e_d; }
    [[nodiscard]] bool converter_on() const noexcept { return converter_on_; }
    [[nodiscard]] const std::optional<WindowEvent>& last_estimate(int d) const { return last_est_.at(d); }
    [[nodiscard]] DqPair current_reference() const noexcept { return i_ref_; }

    /// Turns the converter on at the given peak current, or off (i_peak <= 0).
    void set_converter(bool on, double i_peak = 0.0);
    void set_pump(int inverter, bool on);
    void set_desat(int d, const DesatConfig& cfg) { desat_.at(d) = cfg; }
    void set_lut(int d, RonLut lut) { lut_.at(d) = std::move(lut); }

    /// One control period with the converter on, or an idle thermal step.
    void step();
    /// Steps until the simulated time has advanced by at least seconds.
    void run_for(double seconds);
    /// Steps through n complete fundamental cycles.
    void run_fundamental_cycles(int n);

    /// Called for every completed sampling window.
    std::function<void(const WindowEvent&)> on_window;
    /// Called at each fundamental-cycle boundary.
    std::function<void()> on_fundamental;
    /// Called every waveform_decimation steps while set.
    std::function<void(const WaveformRow&)> on_waveform;
    /// Called with (device, t_j) whenever theta crosses the device's current-peak angle.
    std::function<void(int, double)> on_peak_sample;

    /// Thermal-only stepping with the pump on until every junction is within
    /// tolerance of the coolant temperature.
    void cool_to_ambient(double tolerance);

    /// V_th, ambient R_on and V_SD of every device; recalibrates the LUTs and
    /// compensates the DESAT thresholds. The bench must be idle and at ambient.
    StartupResult startup_measurements();

    /// Body-diode voltage of every device at its present junction temperature.
    std::array<double, k_devices> measure_vsd();

    /// Applies the aging trajectory for the given cycle to the devices under test.
    void age_to(std::uint64_t cycle);

    /// Energy balance restarted from the present state.
    void reset_energy() noexcept;

    /// Angle (unwrapped near [0, 2*pi)) of the device's sampled current peak.
    [[nodiscard]] double peak_angle(int d) const noexcept { return peak_angle_[d]; }

private:
    void converter_step();
    void idle_step();
    void thermal_update(const std::array<double, k_devices>& p_loss, double dt);
    void refresh_terms();
    void capture(int d, double theta0, double theta1, const PlantState& before, const PlantState& after,
                 const std::array<double, k_devices>& tj0, double dt);
    void peak_samples(double theta0, double theta1, const std::array<double, k_devices>& tj0);
    void fundamental_boundary();
    void emit_waveform();
    [[nodiscard]] double duty_fraction(int d) const noexcept;
    [[nodiscard]] double on_state_voltage(int d, double i_dev, double t_j) const;

    Scenario sc_;
    ValidatedConfig cfg_;
    double dt_;
    SimClock clock_;
    std::uint64_t ticks_ = 0;  ///< elapsed time in units of dt
    std::uint64_t steps_ = 0;  ///< calls to step()

    PlantParams pp_;
    PlantState plant_;
    ControllerState ctl_;
    DutyCommand cmd_;
    bool converter_on_ = false;
    DqPair i_ref_{};
    double i_peak_ = 0.0;

    std::array<DeviceState, k_devices> dev_;
    std::array<double, k_devices> frac_{};  ///< conducting fraction of the last step
    Abc poles_test_{}, poles_load_{};       ///< switched mode, last sub-step
    std::array<RonTerms, k_devices> terms_;
    int terms_age_ = 0;
    std::array<FosterNetwork, k_devices> net_;
    std::array<double, k_devices> t_j_{};
    std::array<double, k_devices> t_case_{};
    std::array<NtcModel, k_devices> ntc_;
    std::array<double, k_devices> ntc_val_{};
    std::array<CoolingState, 2> cool_;
    std::array<Boundary, 2> boundary_;

    std::array<SenseChannel, k_devices> sense_;
    std::array<DesatConfig, k_devices> desat_;
    std::array<DesatMonitor, k_devices> desat_mon_;
    std::array<TriggerSet, k_devices> triggers_;
    std::array<SamplerState, k_devices> samplers_;
    std::array<std::vector<double>, k_devices> truth_r_;
    std::array<std::vector<double>, k_devices> truth_t_;
    std::array<std::optional<SamplerState>, k_devices> last_window_;
    std::array<std::optional<WindowEvent>, k_devices> last_est_;
    std::array<double, k_devices> peak_angle_{};
    std::vector<double> taps_;
    RonLut fresh_lut_;
    std::array<RonLut, k_devices> lut_;
    int settle_left_ = 0;
    bool armed_ = false;

    EnergyTelemetry energy_;
};

}  // namespace acpc
