#include "acpc/cycling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace acpc {

std::string warning_string(unsigned flags) {
    std::string out;
    auto add = [&](unsigned bit, const char* name) {
        if (!(flags & bit)) return;
        if (!out.empty()) out += '|';
        out += name;
    };
    add(PackageWarning, "package");
    add(GateOxideWarning, "gate_oxide");
    add(BodyDiodeWarning, "body_diode");
    return out;
}

namespace {

constexpr double k_inf = std::numeric_limits<double>::infinity();

// Restores the bench callbacks it replaced.
class CallbackScope {
public:
    explicit CallbackScope(Bench& b) : b_(b), window_(b.on_window), peak_(b.on_peak_sample) {}
    ~CallbackScope() {
        b_.on_window = window_;
        b_.on_peak_sample = peak_;
    }
    CallbackScope(const CallbackScope&) = delete;
    CallbackScope& operator=(const CallbackScope&) = delete;

    const std::function<void(const WindowEvent&)>& window() const noexcept { return window_; }
    const std::function<void(int, double)>& peak() const noexcept { return peak_; }

private:
    Bench& b_;
    std::function<void(const WindowEvent&)> window_;
    std::function<void(int, double)> peak_;
};

double max_iut_ntc(const Bench& b) {
    double m = -k_inf;
    for (int d = 0; d < k_iut_devices; ++d) m = std::max(m, b.ntc_reading(d));
    return m;
}

}  // namespace

CycleRecord run_cycle(Bench& b, std::uint64_t cycle_index) {
    const Scenario& sc = b.scenario();
    const BenchConfig& cfg = b.config().config();
    b.age_to(cycle_index);

    CycleRecord rec;
    rec.cycle_index = cycle_index;
    rec.t_start = b.time();

    std::array<double, k_devices> hot{}, cold{};
    hot.fill(-k_inf);
    cold.fill(k_inf);
    std::array<std::optional<double>, k_devices> estimate{}, r_heat{}, r_any{};
    bool heating = true;
    bool fresh = false;

    CallbackScope scope(b);
    b.on_peak_sample = [&](int d, double t) {
        if (heating) hot[d] = std::max(hot[d], t);
        else cold[d] = std::min(cold[d], t);
        if (scope.peak()) scope.peak()(d, t);
    };
    b.on_window = [&](const WindowEvent& e) {
        estimate[e.device] = e.t_j_estimate;
        fresh = true;
        r_any[e.device] = e.estimate.r_on;
        if (heating) r_heat[e.device] = e.estimate.r_on;
        if (scope.window()) scope.window()(e);
    };
    // Mean over the devices under test, once all of them have reported.
    // Averaging the six nominally identical switches keeps sensor noise out of
    // the switching decision.
    auto mean_estimate = [&]() -> std::optional<double> {
        double sum = 0.0;
        for (int d = 0; d < k_iut_devices; ++d) {
            if (!estimate[d]) return std::nullopt;
            sum += *estimate[d];
        }
        return sum / k_iut_devices;
    };
    auto guard = [&](double t_phase, const char* phase) {
        if (b.time() - t_phase > sc.max_phase_time) {
            throw Timeout(std::string(phase) + " phase exceeded max_phase_time in cycle " + std::to_string(cycle_index));
        }
    };

    // Heating: the test inverter's pump stops while the converter runs.
    b.set_pump(0, false);
    b.set_pump(1, true);
    b.set_converter(true, cfg.i_ref_peak);
    const double t_heat = b.time();
    switch (cfg.technique) {
    case Technique::FixedTimes: {
        const double end = t_heat + *cfg.t_on - 0.5 * b.dt();
        while (b.time() < end) b.step();
        break;
    }
    case Technique::CaseSwing:
        while (max_iut_ntc(b) < *cfg.t_case_max) {
            guard(t_heat, "heating");
            b.step();
        }
        break;
    case Technique::JunctionSwing:
        for (;;) {
            fresh = false;
            b.step();
            if (fresh) {
                const auto m = mean_estimate();
                if (m && *m >= *cfg.t_j_max) break;
            }
            guard(t_heat, "heating");
        }
        break;
    }
    rec.t_on_actual = b.time() - t_heat;

    heating = false;
    estimate.fill(std::nullopt);
    const double t_cool = b.time();
    b.set_pump(0, true);
    switch (cfg.technique) {
    case Technique::FixedTimes: {
        b.set_converter(false);
        const double end = t_cool + *cfg.t_off - 0.5 * b.dt();
        while (b.time() < end) b.step();
        break;
    }
    case Technique::CaseSwing:
        b.set_converter(false);
        while (max_iut_ntc(b) > *cfg.t_case_min) {
            guard(t_cool, "cooling");
            b.step();
        }
        break;
    case Technique::JunctionSwing:
        // A small sensing current keeps the on-resistance estimate alive.
        b.set_converter(true, sc.sense_current);
        for (;;) {
            fresh = false;
            b.step();
            if (fresh) {
                const auto m = mean_estimate();
                if (m && *m <= *cfg.t_j_min) break;
            }
            guard(t_cool, "cooling");
        }
        break;
    }
    rec.t_off_actual = b.time() - t_cool;

    const auto v_sd = b.measure_vsd();
    for (int d = 0; d < k_devices; ++d) {
        auto& r = rec.devices[d];
        r.t_j_max = std::isfinite(hot[d]) ? hot[d] : b.t_j(d);
        r.t_j_min = std::isfinite(cold[d]) ? cold[d] : b.t_j(d);
        r.t_j_min = std::min(r.t_j_min, r.t_j_max);
        r.delta_t_j = r.t_j_max - r.t_j_min;
        r.r_on_est = r_heat[d] ? r_heat[d] : r_any[d];
        r.v_sd = v_sd[d];
    }
    return rec;
}

void WarningTracker::update(CycleRecord& rec) {
    for (int d = 0; d < k_devices; ++d) {
        auto& r = rec.devices[d];
        auto& base = base_[d];
        if (r.r_on_est) {
            if (!base.r_on) base.r_on = r.r_on_est;
            else if (std::abs(*r.r_on_est - *base.r_on) > policy_.r_on_rel_threshold * std::abs(*base.r_on)) {
                flags_[d] |= PackageWarning;
            }
        }
        if (r.v_th) {
            if (!base.v_th) base.v_th = r.v_th;
            else if (std::abs(*r.v_th - *base.v_th) > policy_.v_th_shift_threshold) flags_[d] |= GateOxideWarning;
        }
        if (r.v_sd) {
            if (!base.v_sd) base.v_sd = r.v_sd;
            else if (std::abs(*r.v_sd - *base.v_sd) > policy_.v_sd_shift_threshold) flags_[d] |= BodyDiodeWarning;
        }
        r.warnings = flags_[d];
    }
}

std::array<unsigned, k_devices> evaluate_warnings(const std::vector<CycleRecord>& history,
                                                  const WarningPolicy& policy) {
    WarningTracker t(policy);
    for (CycleRecord rec : history) t.update(rec);
    return t.flags();
}

Campaign::Campaign(Bench& bench) : bench_(bench), warnings_(bench.scenario().warnings) {}

bool Campaign::startup_due(std::uint64_t cycle) const noexcept {
    const auto k = bench_.scenario().startup.interval;
    return cycle == 0 || (k > 0 && cycle % k == 0);
}

const CycleRecord& Campaign::run_next() {
    const std::uint64_t c = next_;
    bench_.age_to(c);
    std::optional<StartupResult> measured;
    if (startup_due(c)) {
        bench_.cool_to_ambient(bench_.scenario().startup.cooldown_tolerance);
        measured = bench_.startup_measurements();
        startup_ = measured;
        if (on_startup) on_startup(c, *measured);
    }
    CycleRecord rec = run_cycle(bench_, c);
    if (measured) {
        for (int d = 0; d < k_devices; ++d) rec.devices[d].v_th = measured->v_th[d];
    }
    warnings_.update(rec);
    records_.push_back(std::move(rec));
    ++next_;
    if (on_record) on_record(records_.back());
    return records_.back();
}

void Campaign::run(std::uint64_t n_cycles) {
    for (std::uint64_t k = 0; k < n_cycles; ++k) run_next();
}

EnergyAudit energy_audit(const EnergyTelemetry& e) noexcept {
    EnergyAudit a;
    const double loss = e.e_device_loss + e.e_link_loss;
    const double stored = e.e_inductor - e.e_inductor0;
    if (e.time > 0.0) {
        a.p_supply = e.e_supply / e.time;
        a.p_loss_total = loss / e.time;
        a.p_circulated = e.e_circulated / e.time;
    }
    const double mismatch = std::abs(e.e_supply - loss - stored);
    a.residual = loss > 0.0 ? mismatch / loss : (mismatch > 0.0 ? k_inf : 0.0);
    a.circulation_ratio = a.p_supply > 0.0 ? a.p_circulated / a.p_supply : k_inf;
    return a;
}

}  // namespace acpc
