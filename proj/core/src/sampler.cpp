#include "acpc/sampler.hpp"

#include "acpc/config.hpp"
#include "acpc/sense.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace acpc {

TriggerSet build_trigger_set(double theta_peak, int n, double window) {
    if (n < 1) throw ConfigError("sampler.n", "must be at least 1");
    if (!(window > 0.0) || window > std::numbers::pi / 2.0) throw ConfigError("sampler.window", "must lie in (0, pi/2]");
    TriggerSet s;
    s.center = theta_peak;
    if (n == 1) {
        s.angles = {theta_peak};
        s.tolerance = window;
        return s;
    }
    s.angles.resize(static_cast<std::size_t>(n));
    const double lo = theta_peak - window;
    const double step = 2.0 * window / (n - 1);
    for (int k = 0; k < n; ++k) s.angles[k] = lo + step * k;
    s.angles.back() = theta_peak + window;
    double min_gap = std::numeric_limits<double>::infinity();
    for (int k = 1; k < n; ++k) min_gap = std::min(min_gap, s.angles[k] - s.angles[k - 1]);
    s.tolerance = 0.5 * min_gap;
    return s;
}

double unwrap_near(double theta_now, double center) noexcept { return center + wrap_pi(theta_now - center); }

namespace {

// First index in [lo, hi) whose angle exceeds x.
int upper_bound_rec(const std::vector<double>& a, double x, int lo, int hi) noexcept {
    if (lo >= hi) return lo;
    const int mid = lo + (hi - lo) / 2;
    if (a[mid] > x) return upper_bound_rec(a, x, lo, mid);
    return upper_bound_rec(a, x, mid + 1, hi);
}

}  // namespace

std::optional<int> match_trigger(double theta_now, const TriggerSet& set) noexcept {
    const auto& a = set.angles;
    if (a.empty()) return std::nullopt;
    const double x = unwrap_near(theta_now, set.center);
    const int p = upper_bound_rec(a, x, 0, static_cast<int>(a.size()));
    if (p > 0 && std::abs(x - a[p - 1]) <= set.tolerance) return p - 1;
    if (p < static_cast<int>(a.size()) && std::abs(x - a[p]) <= set.tolerance) return p;
    return std::nullopt;
}

std::optional<int> match_trigger_linear(double theta_now, const TriggerSet& set) noexcept {
    const double x = unwrap_near(theta_now, set.center);
    for (std::size_t k = 0; k < set.angles.size(); ++k) {
        if (std::abs(x - set.angles[k]) <= set.tolerance) return static_cast<int>(k);
    }
    return std::nullopt;
}

SamplerState::SamplerState(int n, int budget_per_cycle, CaptureMode mode)
    : slots_(static_cast<std::size_t>(n)), budget_(budget_per_cycle), mode_(mode) {
    if (n < 1) throw ConfigError("sampler.n", "must be at least 1");
    if (budget_per_cycle < 1) throw ConfigError("sampler.budget", "must be at least 1");
    if (mode_ == CaptureMode::Sequential) budget_ = 1;
    stride_ = (n + budget_ - 1) / budget_;
}

bool SamplerState::scheduled(int k) const noexcept {
    const auto c = static_cast<std::uint64_t>(cycles_);
    if (mode_ == CaptureMode::Sequential) return static_cast<std::uint64_t>(k) == c % slots_.size();
    return static_cast<std::uint64_t>(k % stride_) == c % static_cast<std::uint64_t>(stride_);
}

bool SamplerState::offer(int k, double v_on, double i) noexcept {
    if (!accepts(k)) return false;
    slots_[k] = Slot{v_on, i};
    ++filled_;
    ++used_;
    return true;
}

void SamplerState::next_cycle() noexcept {
    ++cycles_;
    used_ = 0;
}

void SamplerState::clear() noexcept {
    for (auto& s : slots_) s.reset();
    filled_ = 0;
    used_ = 0;
    cycles_ = 0;
}

bool sampler_update(SamplerState& s, const TriggerSet& set, double theta_now, const SenseReading& reading,
                    double i_meas) {
    if (!reading.valid) return false;
    const auto k = match_trigger(theta_now, set);
    if (!k) return false;
    return s.offer(*k, reading.v_op1, i_meas);
}

std::uint64_t cycles_to_complete(int n, int budget, CaptureMode mode) noexcept {
    if (mode == CaptureMode::Sequential) return static_cast<std::uint64_t>(n);
    return static_cast<std::uint64_t>((n + budget - 1) / budget);
}

std::vector<double> fir_lowpass(int n_taps, double cutoff) {
    if (n_taps < 1 || n_taps % 2 == 0) throw ConfigError("sampler.fir_taps", "must be a positive odd count");
    if (!(cutoff > 0.0 && cutoff < 0.5)) throw ConfigError("sampler.fir_cutoff", "must lie in (0, 0.5)");
    std::vector<double> h(static_cast<std::size_t>(n_taps));
    const int m = n_taps / 2;
    double sum = 0.0;
    for (int k = 0; k < n_taps; ++k) {
        const double x = k - m;
        const double sinc = x == 0.0 ? 1.0 : std::sin(2.0 * std::numbers::pi * cutoff * x) / (std::numbers::pi * x) / (2.0 * cutoff);
        const double w = n_taps == 1 ? 1.0 : 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * k / (n_taps - 1));
        h[k] = 2.0 * cutoff * sinc * w;
        sum += h[k];
    }
    for (auto& v : h) v /= sum;
    // Exact symmetry regardless of rounding in the window.
    for (int k = 0; k < m; ++k) h[n_taps - 1 - k] = h[k];
    return h;
}

namespace {

// Symmetric (edge-repeating) reflection of index j into [0, n).
std::size_t reflect(long j, long n) noexcept {
    const long period = 2 * n;
    long r = j % period;
    if (r < 0) r += period;
    return static_cast<std::size_t>(r < n ? r : period - 1 - r);
}

// Weighted average at position k over the entries where `use` holds.
double filtered_at(const std::vector<double>& x, const std::vector<bool>& use, const std::vector<double>& taps,
                   long k, double& weight) noexcept {
    const long n = static_cast<long>(x.size());
    const long m = static_cast<long>(taps.size()) / 2;
    double acc = 0.0;
    weight = 0.0;
    for (long j = 0; j < static_cast<long>(taps.size()); ++j) {
        const auto idx = reflect(k + j - m, n);
        if (!use[idx]) continue;
        acc += taps[j] * x[idx];
        weight += taps[j];
    }
    return acc;
}

}  // namespace

std::vector<double> fir_filter(const std::vector<double>& raw, const std::vector<double>& taps) {
    std::vector<double> out(raw.size());
    const std::vector<bool> use(raw.size(), true);
    for (std::size_t k = 0; k < raw.size(); ++k) {
        double w = 0.0;
        out[k] = filtered_at(raw, use, taps, static_cast<long>(k), w);
    }
    return out;
}

namespace {

void slot_ratios(const SamplerState& s, double i_floor, std::vector<double>& r, std::vector<bool>& use) {
    r.assign(static_cast<std::size_t>(s.size()), 0.0);
    use.assign(static_cast<std::size_t>(s.size()), false);
    for (int k = 0; k < s.size(); ++k) {
        const auto& slot = s.slots()[k];
        if (slot && std::abs(slot->i) >= i_floor) {
            r[k] = slot->v_on / slot->i;
            use[k] = true;
        }
    }
}

}  // namespace

RonEstimate estimate_ron(const SamplerState& s, const std::vector<double>& taps, double i_floor) {
    if (!s.complete()) throw Incomplete("sampler window not complete");
    std::vector<double> r;
    std::vector<bool> use;
    slot_ratios(s, i_floor, r, use);
    const int center = s.size() / 2;
    double w = 0.0;
    const double acc = filtered_at(r, use, taps, center, w);
    if (w <= 0.0) throw DivideByZero("no slot carries current above the floor");
    return {acc / w, s.slots()[center]->i};
}

RonTrace ron_trace(const SamplerState& s, const std::vector<double>& taps, double i_floor) {
    RonTrace t;
    std::vector<bool> use;
    slot_ratios(s, i_floor, t.raw, use);
    t.filtered.resize(t.raw.size());
    for (std::size_t k = 0; k < t.raw.size(); ++k) {
        if (!use[k]) t.raw[k] = std::numeric_limits<double>::quiet_NaN();
        double w = 0.0;
        const double acc = filtered_at(t.raw, use, taps, static_cast<long>(k), w);
        t.filtered[k] = w > 0.0 ? acc / w : std::numeric_limits<double>::quiet_NaN();
    }
    return t;
}

}  // namespace acpc
