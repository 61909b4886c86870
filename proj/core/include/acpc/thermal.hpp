#pragma once

// Junction-to-coolant Foster networks, the switched liquid-cooling boundary
// and the NTC case sensor.
//
// The last Foster stage is the case-to-boundary stage; its resistance follows
// the cooling state while its capacitance stays fixed.

#include "acpc/errors.hpp"

#include <vector>

namespace acpc {

struct FosterStage {
    double r_th = 0.0;  ///< K/W
    double c_th = 0.0;  ///< J/K

    [[nodiscard]] double tau() const noexcept { return r_th * c_th; }

    bool operator==(const FosterStage&) const = default;
};

class FosterNetwork {
public:
    FosterNetwork() = default;
    /// Throws ConfigError unless every stage has positive r_th and c_th.
    explicit FosterNetwork(std::vector<FosterStage> stages, double r_th_aging_factor = 1.0);

    [[nodiscard]] const std::vector<FosterStage>& stages() const noexcept { return stages_; }
    [[nodiscard]] const std::vector<double>& stage_temps() const noexcept { return temps_; }
    [[nodiscard]] double r_th_aging_factor() const noexcept { return aging_; }
    [[nodiscard]] double min_tau() const noexcept;
    /// Sum of effective stage resistances, K/W.
    [[nodiscard]] double total_r_th() const noexcept;

    /// Effective stage resistance (the first stage carries the aging factor).
    [[nodiscard]] double stage_r(std::size_t k) const noexcept;

    void set_r_th_aging_factor(double f);
    void set_boundary_resistance(double r_th);
    void set_stage_temps(std::vector<double> temps);
    void reset() noexcept;

    /// Rise of the junction and of the case above the reference.
    [[nodiscard]] double junction_rise() const noexcept;
    [[nodiscard]] double case_rise() const noexcept { return temps_.empty() ? 0.0 : temps_.back(); }
    /// Heat currently leaving the boundary stage into the reference, W.
    [[nodiscard]] double boundary_heat() const noexcept;

    /// Exact single-pole update of every stage for constant loss over dt.
    void advance(double p_loss, double dt);

private:
    void refresh_decay(double dt) const;

    std::vector<FosterStage> stages_;
    std::vector<double> temps_;
    double aging_ = 1.0;
    mutable std::vector<double> decay_;
    mutable double decay_dt_ = -1.0;
};

struct ThermalSample {
    double t_j = 0.0;
    double t_case = 0.0;
};

/// Advances the network and returns absolute junction and case temperatures.
/// Throws StepTooLarge unless dt < min stage tau / 4.
ThermalSample foster_step(FosterNetwork& net, double p_loss, double t_ref, double dt);

/// Default four-stage network: tau of 1 ms, 30 ms, 0.5 s and 5 s with the pump on.
[[nodiscard]] FosterNetwork default_foster_network();

struct CoolingState {
    bool pump_on = true;
    double coolant_temp = 25.0;
    double coolant_setpoint = 25.0;
    double ambient = 25.0;
    double r_boundary_on = 0.2;
    double r_boundary_off = 1.0;
    double max_heat = 1500.0;          ///< W per cold plate
    double coolant_capacity = 2.0e4;   ///< J/K of the loop
    bool capacity_exceeded = false;

    bool operator==(const CoolingState&) const = default;
};

struct Boundary {
    double t_ref = 25.0;
    double r_boundary = 0.2;
};

/// Throws ConfigError if r_boundary_on >= r_boundary_off or max_heat <= 0.
void check_cooling(const CoolingState& c);

/// Sets the pump state and returns the boundary seen by the networks.
Boundary cooling_step(CoolingState& c, bool pump_on) noexcept;

/// Coolant energy balance for one step with q_in watts arriving at the plate.
/// Heat above max_heat warms the loop and raises capacity_exceeded.
void coolant_update(CoolingState& c, double q_in, double dt) noexcept;

struct NtcModel {
    double bias = 0.0;
    double time_constant = 0.5;
    double state = 0.0;
    bool primed = false;
};

/// First-order lagged case temperature plus bias.
double ntc_read(NtcModel& n, double t_case_true, double dt) noexcept;

}  // namespace acpc
