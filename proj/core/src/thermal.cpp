#include "acpc/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace acpc {

FosterNetwork::FosterNetwork(std::vector<FosterStage> stages, double r_th_aging_factor)
    : stages_(std::move(stages)), temps_(stages_.size(), 0.0) {
    if (stages_.empty()) throw ConfigError("thermal.stages", "at least one stage required");
    for (const auto& s : stages_) {
        if (!(s.r_th > 0.0) || !(s.c_th > 0.0)) throw ConfigError("thermal.stages", "r_th and c_th must be positive");
    }
    set_r_th_aging_factor(r_th_aging_factor);
}

double FosterNetwork::stage_r(std::size_t k) const noexcept {
    return k == 0 ? stages_[0].r_th * aging_ : stages_[k].r_th;
}

double FosterNetwork::min_tau() const noexcept {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < stages_.size(); ++k) m = std::min(m, stage_r(k) * stages_[k].c_th);
    return m;
}

double FosterNetwork::total_r_th() const noexcept {
    double r = 0.0;
    for (std::size_t k = 0; k < stages_.size(); ++k) r += stage_r(k);
    return r;
}

void FosterNetwork::set_r_th_aging_factor(double f) {
    if (!(f >= 1.0)) throw ConfigError("thermal.r_th_aging_factor", "must be at least 1");
    aging_ = f;
    decay_dt_ = -1.0;
}

void FosterNetwork::set_boundary_resistance(double r_th) {
    if (stages_.back().r_th == r_th) return;
    stages_.back().r_th = r_th;
    decay_dt_ = -1.0;
}

void FosterNetwork::set_stage_temps(std::vector<double> temps) {
    if (temps.size() != stages_.size()) throw Error("stage temperature count does not match the network");
    temps_ = std::move(temps);
}

void FosterNetwork::reset() noexcept { std::fill(temps_.begin(), temps_.end(), 0.0); }

double FosterNetwork::junction_rise() const noexcept { return std::accumulate(temps_.begin(), temps_.end(), 0.0); }

double FosterNetwork::boundary_heat() const noexcept {
    return temps_.empty() ? 0.0 : temps_.back() / stage_r(stages_.size() - 1);
}

void FosterNetwork::refresh_decay(double dt) const {
    if (dt == decay_dt_) return;
    decay_.resize(stages_.size());
    for (std::size_t k = 0; k < stages_.size(); ++k) decay_[k] = std::exp(-dt / (stage_r(k) * stages_[k].c_th));
    decay_dt_ = dt;
}

void FosterNetwork::advance(double p_loss, double dt) {
    refresh_decay(dt);
    for (std::size_t k = 0; k < stages_.size(); ++k) {
        temps_[k] = temps_[k] * decay_[k] + p_loss * stage_r(k) * (1.0 - decay_[k]);
    }
}

ThermalSample foster_step(FosterNetwork& net, double p_loss, double t_ref, double dt) {
    if (!(dt > 0.0) || !(dt < net.min_tau() / 4.0)) throw StepTooLarge("thermal step must be below a quarter of the fastest time constant");
    net.advance(p_loss, dt);
    return {t_ref + net.junction_rise(), t_ref + net.case_rise()};
}

FosterNetwork default_foster_network() {
    const auto stage = [](double r, double tau) { return FosterStage{r, tau / r}; };
    return FosterNetwork({stage(0.02, 1e-3), stage(0.06, 30e-3), stage(0.15, 0.5), stage(0.2, 5.0)});
}

void check_cooling(const CoolingState& c) {
    if (!(c.r_boundary_on > 0.0)) throw ConfigError("cooling.r_boundary_on", "must be positive");
    if (!(c.r_boundary_on < c.r_boundary_off)) throw ConfigError("cooling.r_boundary_off", "must exceed r_boundary_on");
    if (!(c.max_heat > 0.0)) throw ConfigError("cooling.max_heat", "must be positive");
    if (!(c.coolant_capacity > 0.0)) throw ConfigError("cooling.coolant_capacity", "must be positive");
}

Boundary cooling_step(CoolingState& c, bool pump_on) noexcept {
    c.pump_on = pump_on;
    if (pump_on) return {c.coolant_temp, c.r_boundary_on};
    return {c.ambient, c.r_boundary_off};
}

void coolant_update(CoolingState& c, double q_in, double dt) noexcept {
    if (!c.pump_on) return;
    const double spare = c.max_heat - q_in;
    if (spare < 0.0) {
        c.coolant_temp += -spare * dt / c.coolant_capacity;
        c.capacity_exceeded = true;
    } else if (c.coolant_temp > c.coolant_setpoint) {
        c.coolant_temp = std::max(c.coolant_setpoint, c.coolant_temp - spare * dt / c.coolant_capacity);
    }
}

double ntc_read(NtcModel& n, double t_case_true, double dt) noexcept {
    if (!n.primed || n.time_constant <= 0.0) {
        n.state = t_case_true;
        n.primed = true;
    } else {
        n.state += (t_case_true - n.state) * (1.0 - std::exp(-dt / n.time_constant));
    }
    return n.state + n.bias;
}

}  // namespace acpc
