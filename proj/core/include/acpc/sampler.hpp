#pragma once

// Out-of-order equivalent-time sampling of the on-state voltage around the
// current peak, FIR smoothing and the online on-resistance estimate.

#include "acpc/errors.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace acpc {

struct SenseReading;

struct TriggerSet {
    /// Strictly increasing, unwrapped around `center` (may leave [0, 2*pi)).
    std::vector<double> angles;
    double tolerance = 0.0;
    double center = 0.0;
};

[[nodiscard]] TriggerSet build_trigger_set(double theta_peak, int n, double window);

/// Index of the trigger within tolerance of theta_now, by recursive binary search.
[[nodiscard]] std::optional<int> match_trigger(double theta_now, const TriggerSet& set) noexcept;

/// Reference implementation used to cross-check match_trigger.
[[nodiscard]] std::optional<int> match_trigger_linear(double theta_now, const TriggerSet& set) noexcept;

/// theta_now moved onto the unwrapped branch of the trigger set.
[[nodiscard]] double unwrap_near(double theta_now, double center) noexcept;

enum class CaptureMode {
    OutOfOrder,  ///< interleaved slots, up to the per-cycle budget
    Sequential,  ///< one slot per fundamental cycle, in angle order
};

struct Slot {
    double v_on = 0.0;
    double i = 0.0;
};

class SamplerState {
public:
    SamplerState() = default;
    SamplerState(int n, int budget_per_cycle, CaptureMode mode = CaptureMode::OutOfOrder);

    [[nodiscard]] int size() const noexcept { return static_cast<int>(slots_.size()); }
    [[nodiscard]] int filled() const noexcept { return filled_; }
    [[nodiscard]] bool complete() const noexcept { return filled_ == size() && size() > 0; }
    [[nodiscard]] std::uint64_t cycles_elapsed() const noexcept { return cycles_; }
    [[nodiscard]] int budget_per_cycle() const noexcept { return budget_; }
    [[nodiscard]] CaptureMode mode() const noexcept { return mode_; }
    [[nodiscard]] const std::vector<std::optional<Slot>>& slots() const noexcept { return slots_; }

    /// Whether the capture schedule lets slot k be taken in the current cycle.
    [[nodiscard]] bool scheduled(int k) const noexcept;

    /// Whether offer(k, ...) would store a value right now.
    [[nodiscard]] bool accepts(int k) const noexcept {
        return k >= 0 && k < size() && !slots_[k] && used_ < budget_ && scheduled(k);
    }

    /// Stores a capture into slot k if it is unfilled, scheduled and the
    /// budget allows. Returns true when stored.
    bool offer(int k, double v_on, double i) noexcept;

    /// Marks the start of the next fundamental cycle.
    void next_cycle() noexcept;

    /// Empties every slot and restarts the schedule.
    void clear() noexcept;

private:
    std::vector<std::optional<Slot>> slots_;
    int filled_ = 0;
    int budget_ = 5;
    int stride_ = 1;
    int used_ = 0;
    std::uint64_t cycles_ = 0;
    CaptureMode mode_ = CaptureMode::OutOfOrder;
};

/// Offers the reading at theta_now to the slot its trigger matches.
/// Invalid readings are ignored. Returns true when a slot was filled.
bool sampler_update(SamplerState& s, const TriggerSet& set, double theta_now, const SenseReading& reading,
                    double i_meas);

/// Fundamental cycles needed to fill n slots under the deterministic budget model.
[[nodiscard]] std::uint64_t cycles_to_complete(int n, int budget, CaptureMode mode = CaptureMode::OutOfOrder) noexcept;

/// Hamming-windowed sinc low-pass, normalized to unity DC gain.
[[nodiscard]] std::vector<double> fir_lowpass(int n_taps = 31, double cutoff = 0.1);

/// Convolution with symmetric edge padding; output has the length of raw.
[[nodiscard]] std::vector<double> fir_filter(const std::vector<double>& raw, const std::vector<double>& taps);

struct RonEstimate {
    double r_on = 0.0;
    double i_at_peak = 0.0;
};

/// Filtered on-resistance at the center slot. Slots with |i| below i_floor
/// drop out of the filter support. Throws Incomplete or DivideByZero.
[[nodiscard]] RonEstimate estimate_ron(const SamplerState& s, const std::vector<double>& taps, double i_floor = 5.0);

/// Raw per-slot resistance and its filtered trace (NaN where excluded).
struct RonTrace {
    std::vector<double> raw;
    std::vector<double> filtered;
};

[[nodiscard]] RonTrace ron_trace(const SamplerState& s, const std::vector<double>& taps, double i_floor = 5.0);

}  // namespace acpc
