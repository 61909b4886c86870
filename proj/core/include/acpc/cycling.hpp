#pragma once

// Thermal-cycle orchestration for the three power-cycling techniques,
// per-cycle precursor records, early warnings and the energy audit.

#include "acpc/bench.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace acpc {

enum WarningFlag : unsigned {
    PackageWarning = 1u,
    GateOxideWarning = 2u,
    BodyDiodeWarning = 4u,
};

/// "package|gate_oxide|body_diode" subset, empty for no flags.
[[nodiscard]] std::string warning_string(unsigned flags);

struct DeviceRecord {
    std::optional<double> r_on_est;  ///< ohm, last heating-phase window
    double t_j_max = 0.0;
    double t_j_min = 0.0;
    double delta_t_j = 0.0;
    std::optional<double> v_th;      ///< only on cycles with start-up measurements
    std::optional<double> v_sd;
    unsigned warnings = 0;           ///< latched flags up to this cycle

    bool operator==(const DeviceRecord&) const = default;
};

struct CycleRecord {
    std::uint64_t cycle_index = 0;
    double t_start = 0.0;
    std::array<DeviceRecord, k_devices> devices{};
    double t_on_actual = 0.0;
    double t_off_actual = 0.0;

    bool operator==(const CycleRecord&) const = default;
};

/// Runs one heating and cooling cycle of the configured technique.
/// Throws ProtectionTrip, ThermalRunaway, or Timeout when a phase exceeds
/// the scenario's max_phase_time.
CycleRecord run_cycle(Bench& bench, std::uint64_t cycle_index);

/// Latched warning flags per device over the whole history. The baseline of
/// each precursor is the first record that carries it.
[[nodiscard]] std::array<unsigned, k_devices> evaluate_warnings(const std::vector<CycleRecord>& history,
                                                                const WarningPolicy& policy);

/// Incremental form of evaluate_warnings.
class WarningTracker {
public:
    explicit WarningTracker(WarningPolicy policy = {}) : policy_(policy) {}
    /// Folds the record in and stores the latched flags into it.
    void update(CycleRecord& rec);
    [[nodiscard]] const std::array<unsigned, k_devices>& flags() const noexcept { return flags_; }

private:
    struct Baseline {
        std::optional<double> r_on, v_th, v_sd;
    };
    WarningPolicy policy_;
    std::array<Baseline, k_devices> base_{};
    std::array<unsigned, k_devices> flags_{};
};

/// Cycle loop with periodic start-up measurements and warnings.
class Campaign {
public:
    explicit Campaign(Bench& bench);

    [[nodiscard]] std::uint64_t next_cycle() const noexcept { return next_; }
    [[nodiscard]] const std::vector<CycleRecord>& records() const noexcept { return records_; }
    [[nodiscard]] const std::optional<StartupResult>& last_startup() const noexcept { return startup_; }
    [[nodiscard]] bool startup_due(std::uint64_t cycle) const noexcept;

    const CycleRecord& run_next();
    void run(std::uint64_t n_cycles);

    std::function<void(const CycleRecord&)> on_record;
    std::function<void(std::uint64_t, const StartupResult&)> on_startup;

private:
    Bench& bench_;
    WarningTracker warnings_;
    std::vector<CycleRecord> records_;
    std::optional<StartupResult> startup_;
    std::uint64_t next_ = 0;
};

struct EnergyAudit {
    double p_supply = 0.0;       ///< W
    double p_loss_total = 0.0;   ///< W, devices plus links
    double residual = 0.0;       ///< |E_supply - E_loss - dE_L| / E_loss
    double p_circulated = 0.0;   ///< W of apparent power through the test inverter
    double circulation_ratio = 0.0;
};

[[nodiscard]] EnergyAudit energy_audit(const EnergyTelemetry& e) noexcept;

}  // namespace acpc
