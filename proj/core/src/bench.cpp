#include "acpc/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace acpc {

namespace {

constexpr double k_two_pi = 2.0 * std::numbers::pi;

double lerp(double a, double b, double w) noexcept { return a + w * (b - a); }

}  // namespace

ValidatedScenario validate(const Scenario& in) {
    Scenario s = in;
    ValidatedConfig cfg = validate_scenario(s.bench);
    s.bench = cfg.config();
    s.device.v_gs_on = s.bench.gate_on_v;
    check_params(s.device);
    if (!(s.bench.gate_on_v > s.device.v_th0)) throw ConfigError("gate_on_v", "must exceed device.v_th0");
    check_trajectory(s.aging);
    check_sense(s.sense);
    if (!(s.desat.threshold > 0.0)) throw ConfigError("desat.threshold", "must be positive");
    if (!(s.desat.blanking > 0.0)) throw ConfigError("desat.blanking", "must be positive");

    s.thermal.cooling.ambient = s.bench.t_ambient;
    check_cooling(s.thermal.cooling);
    FosterNetwork probe(s.thermal.stages, s.thermal.r_th_aging_factor);
    probe.set_boundary_resistance(s.thermal.cooling.r_boundary_on);
    if (s.idle_step_factor < 1) throw ConfigError("idle_step_factor", "must be at least 1");
    if (!(cfg.dt() * s.idle_step_factor < probe.min_tau() / 4.0)) {
        throw ConfigError("thermal.stages", "fastest time constant too short for the idle step");
    }
    if (!(s.thermal.ntc_tau >= 0.0)) throw ConfigError("thermal.ntc_tau", "must be non-negative");

    const auto& sp = s.sampler;
    if (sp.n < 1) throw ConfigError("sampler.n", "must be at least 1");
    if (sp.budget < 1) throw ConfigError("sampler.budget", "must be at least 1");
    if (!(sp.window > 0.0 && sp.window <= std::numbers::pi / 2.0)) throw ConfigError("sampler.window", "must lie in (0, 90] degrees");
    (void)fir_lowpass(sp.fir_taps, sp.fir_cutoff);
    if (!(sp.i_floor > 0.0)) throw ConfigError("sampler.i_floor", "must be positive");
    if (sp.settle_cycles < 0) throw ConfigError("sampler.settle_cycles", "must be non-negative");
    if (!(sp.min_capture_duty >= 0.0 && sp.min_capture_duty < 1.0)) throw ConfigError("sampler.min_capture_duty", "must lie in [0, 1)");

    const auto& w = s.warnings;
    if (!(w.r_on_rel_threshold > 0.0)) throw ConfigError("warn.r_on_rel", "must be positive");
    if (!(w.v_th_shift_threshold > 0.0)) throw ConfigError("warn.v_th_shift", "must be positive");
    if (!(w.v_sd_shift_threshold > 0.0)) throw ConfigError("warn.v_sd_shift", "must be positive");

    if (s.startup.i_cal < 0.0) throw ConfigError("startup.i_cal", "must be non-negative");
    if (s.startup.readings < 1) throw ConfigError("startup.readings", "must be at least 1");
    if (!(s.startup.cooldown_tolerance > 0.0)) throw ConfigError("startup.cooldown_tolerance", "must be positive");
    if (!(s.startup.i_vsd > 0.0)) throw ConfigError("startup.i_vsd", "must be positive");

    if (s.bench.technique == Technique::JunctionSwing && !(s.sense_current > s.sampler.i_floor)) {
        throw ConfigError("sense_current", "must exceed the sampler current floor");
    }
    if (!(s.overcurrent_factor > 1.0)) throw ConfigError("overcurrent_factor", "must exceed 1");
    if (!(s.t_j_limit > s.bench.t_ambient)) throw ConfigError("t_j_limit", "must exceed t_ambient");
    if (s.bench.t_j_max && !(*s.bench.t_j_max < s.t_j_limit)) throw ConfigError("t_j_max", "must stay below t_j_limit");
    if (!(s.max_phase_time > 0.0)) throw ConfigError("max_phase_time", "must be positive");
    if (s.waveform_decimation < 1) throw ConfigError("waveform_decimation", "must be at least 1");

    // Every device must stay in its channel-on region over the aging run.
    DeviceState aged{s.device, {}, s.bench.t_ambient};
    aged.aging.dv_th = s.aging.vth.value_at(std::numeric_limits<std::uint64_t>::max() / 2);
    if (overdrive(aged, s.bench.t_ambient, s.bench.gate_on_v) <= 0.0) {
        throw ConfigError("aging.vth", "threshold shift turns the channel off");
    }
    return ValidatedScenario(std::move(s), std::move(cfg));
}

Bench::Bench(const ValidatedScenario& vs)
    : sc_(vs.scenario()), cfg_(vs.config()), dt_(cfg_.dt()), clock_(dt_, cfg_->f_fund) {
    pp_ = {cfg_->link_inductance, cfg_->link_resistance};
    ctl_ = make_controller(control_params(cfg_));

    std::mt19937_64 rng(cfg_->rng_seed);
    for (int d = 0; d < k_devices; ++d) {
        dev_[d] = DeviceState{sc_.device, {}, cfg_->t_ambient};
        net_[d] = FosterNetwork(sc_.thermal.stages, sc_.thermal.r_th_aging_factor);
        ntc_[d] = NtcModel{sc_.thermal.ntc_bias, sc_.thermal.ntc_tau};
        SenseCircuitParams sp = sc_.sense;
        sp.e_d = draw_e_d(rng);
        sense_[d] = SenseChannel(sp, rng());
        desat_[d] = sc_.desat;
        samplers_[d] = SamplerState(sc_.sampler.n, sc_.sampler.budget, sc_.sampler.mode);
        truth_r_[d].assign(static_cast<std::size_t>(sc_.sampler.n), 0.0);
        truth_t_[d].assign(static_cast<std::size_t>(sc_.sampler.n), 0.0);
    }
    for (int inv = 0; inv < 2; ++inv) {
        cool_[inv] = sc_.thermal.cooling;
        boundary_[inv] = cooling_step(cool_[inv], true);
    }
    for (int d = 0; d < k_devices; ++d) {
        net_[d].set_boundary_resistance(boundary_[device_info(d).inverter].r_boundary);
        t_j_[d] = t_case_[d] = boundary_[device_info(d).inverter].t_ref;
        ntc_val_[d] = ntc_read(ntc_[d], t_case_[d], dt_);
    }
    taps_ = fir_lowpass(sc_.sampler.fir_taps, sc_.sampler.fir_cutoff);
    fresh_lut_ = build_lut(DeviceState{sc_.device, {}, cfg_->t_ambient}, cfg_->gate_on_v);
    lut_.fill(fresh_lut_);
    set_converter(false);
    refresh_terms();
}

void Bench::set_pump(int inverter, bool on) {
    boundary_.at(inverter) = cooling_step(cool_[inverter], on);
}

void Bench::set_converter(bool on, double i_peak) {
    if (!(i_peak > 0.0)) on = false;
    if (on == converter_on_ && (!on || i_peak == i_peak_)) return;
    if (on && !converter_on_) {
        plant_ = PlantState{};
        reset_controller(ctl_);
        poles_test_ = poles_load_ = {};
    }
    if (!on) {
        plant_ = PlantState{};
        cmd_ = DutyCommand{};
        frac_.fill(0.0);
    }
    converter_on_ = on;
    i_peak_ = on ? i_peak : 0.0;
    i_ref_ = acpc::current_reference(i_peak_, cfg_->pf_angle);

    // Each switch is sampled at the current peak where its own pole is mostly on.
    const double phi = cfg_->pf_angle;
    const double omega_l = k_two_pi * cfg_->f_fund * cfg_->link_inductance;
    const DqPair i_dq = acpc::current_reference(1.0, phi);
    const double v_t = cfg_->modulation_index * cfg_->v_dc / std::numbers::sqrt3;
    const double i_pk = on ? i_peak_ : cfg_->i_ref_peak;
    const DqPair v_l{v_t - i_pk * (cfg_->link_resistance * i_dq.d - omega_l * i_dq.q),
                     -i_pk * (cfg_->link_resistance * i_dq.q + omega_l * i_dq.d)};
    const double delta_load = std::atan2(v_l.q, v_l.d);
    for (int d = 0; d < k_devices; ++d) {
        const auto info = device_info(d);
        const double shift = info.phase * k_two_pi / 3.0;
        const double delta = info.inverter == 0 ? 0.0 : delta_load;
        const double want = info.lower ? -1.0 : 1.0;
        double best = 0.0, best_score = -2.0;
        for (double cand : {phi + shift, phi + std::numbers::pi + shift}) {
            const double score = want * std::cos(cand + delta - shift);
            if (score > best_score) {
                best_score = score;
                best = cand;
            }
        }
        peak_angle_[d] = wrap_2pi(best);
        triggers_[d] = build_trigger_set(peak_angle_[d], sc_.sampler.n, sc_.sampler.window);
        samplers_[d].clear();
        desat_mon_[d].reset();
        sense_[d].reset();
    }
    armed_ = false;
    settle_left_ = sc_.sampler.settle_cycles;
    if (on && settle_left_ == 0) armed_ = true;
}

void Bench::refresh_terms() {
    for (int d = 0; d < k_devices; ++d) terms_[d] = ron_terms(dev_[d], t_j_[d], cfg_->gate_on_v);
    terms_age_ = 0;
}

void Bench::age_to(std::uint64_t cycle) {
    for (int d = 0; d < k_iut_devices; ++d) dev_[d].aging = apply_aging(dev_[d].aging, sc_.aging, cycle);
    refresh_terms();
}

void Bench::reset_energy() noexcept {
    energy_ = EnergyTelemetry{};
    double e = 0.0;
    for (double i : plant_.i_abc) e += 0.5 * cfg_->link_inductance * i * i;
    energy_.e_inductor0 = energy_.e_inductor = e;
}

double Bench::duty_fraction(int d) const noexcept { return frac_[d]; }

double Bench::on_state_voltage(int d, double i_dev, double t_j) const {
    return conduction_voltage(dev_[d], i_dev, t_j, cfg_->gate_on_v);
}

void Bench::step() {
    if (converter_on_) converter_step();
    else idle_step();
    ++steps_;
    if (on_waveform && steps_ % static_cast<std::uint64_t>(sc_.waveform_decimation) == 0) emit_waveform();
}

void Bench::run_for(double seconds) {
    const double end = time() + seconds - 0.5 * dt_;
    while (time() < end) step();
}

void Bench::run_fundamental_cycles(int n) {
    int seen = 0;
    auto prev = on_fundamental;
    on_fundamental = [&] {
        ++seen;
        if (prev) prev();
    };
    try {
        while (seen < n) step();
    } catch (...) {
        on_fundamental = prev;
        throw;
    }
    on_fundamental = prev;
}

void Bench::thermal_update(const std::array<double, k_devices>& p_loss, double dt) {
    std::array<double, 2> q_in{0.0, 0.0};
    for (int d = 0; d < k_devices; ++d) {
        const int inv = device_info(d).inverter;
        auto& net = net_[d];
        net.set_boundary_resistance(boundary_[inv].r_boundary);
        net.advance(p_loss[d], dt);
        t_j_[d] = boundary_[inv].t_ref + net.junction_rise();
        t_case_[d] = boundary_[inv].t_ref + net.case_rise();
        ntc_val_[d] = ntc_read(ntc_[d], t_case_[d], dt);
        q_in[inv] += net.boundary_heat();
    }
    for (int inv = 0; inv < 2; ++inv) {
        coolant_update(cool_[inv], q_in[inv], dt);
        if (cool_[inv].pump_on) boundary_[inv].t_ref = cool_[inv].coolant_temp;
    }
    for (int d = 0; d < k_devices; ++d) {
        if (t_j_[d] > sc_.t_j_limit || !std::isfinite(t_j_[d])) {
            throw ThermalRunaway("junction temperature left the simulation envelope", time(), d);
        }
    }
}

void Bench::converter_step() {
    const int n_sub = cfg_.steps_per_pwm();
    const bool switched = cfg_->plant_mode == PlantMode::Switched;
    const std::uint64_t sub = ticks_ % static_cast<std::uint64_t>(n_sub);
    const double theta0 = clock_.at(ticks_).theta;

    if (sub == 0) cmd_ = control_step(plant_.i_abc, i_ref_, theta0, ctl_);
    if (++terms_age_ >= 8) refresh_terms();

    std::array<double, k_devices> r{};
    for (int d = 0; d < k_devices; ++d) {
        const auto info = device_info(d);
        r[d] = terms_[d].at(plant_.i_abc[info.phase]);
    }

    Abc prev_test = poles_test_, prev_load = poles_load_;
    Abc duty_test = cmd_.test, duty_load = cmd_.load;
    if (switched) {
        const double phase = (static_cast<double>(sub) + 0.5) / n_sub;
        poles_test_ = duty_test = pole_states(cmd_.test, phase);
        poles_load_ = duty_load = pole_states(cmd_.load, phase);
    }
    for (int d = 0; d < k_devices; ++d) {
        const auto info = device_info(d);
        const double duty = info.inverter == 0 ? duty_test[info.phase] : duty_load[info.phase];
        frac_[d] = info.lower ? 1.0 - duty : duty;
    }
    Abc r_extra{};
    for (int d = 0; d < k_devices; ++d) r_extra[device_info(d).phase] += r[d] * frac_[d];

    const PlantState before = plant_;
    PlantState after = plant_step(plant_, duty_test, duty_load, cfg_->v_dc, dt_, pp_, r_extra);

    // Losses; switching energy goes to the switch carrying forward current.
    const auto& dp = sc_.device;
    const double e_scale = (dp.e_on0 + dp.e_off0) * (cfg_->v_dc / dp.v_ref_sw) / dp.i_ref_sw;
    std::array<double, k_devices> p{};
    double p_sw_total = 0.0;
    for (int d = 0; d < k_devices; ++d) {
        const auto info = device_info(d);
        const double i_m = info.sign * after.i_mid[info.phase];
        double p_sw = 0.0;
        if (i_m > 0.0) {
            if (switched) {
                const bool test = info.inverter == 0;
                const double now = test ? poles_test_[info.phase] : poles_load_[info.phase];
                const double was = test ? prev_test[info.phase] : prev_load[info.phase];
                if (now != was && steps_ > 0) p_sw = 0.5 * e_scale * i_m / dt_;
            } else {
                const double duty = info.inverter == 0 ? duty_test[info.phase] : duty_load[info.phase];
                if (duty > 0.0 && duty < 1.0) p_sw = cfg_->f_sw * e_scale * i_m;
            }
        }
        p[d] = r[d] * i_m * i_m * frac_[d] + p_sw;
        p_sw_total += p_sw;
    }

    double i_sq = 0.0, e_ind = 0.0;
    for (int k = 0; k < 3; ++k) {
        i_sq += after.i_mid[k] * after.i_mid[k];
        e_ind += 0.5 * cfg_->link_inductance * after.i_abc[k] * after.i_abc[k];
    }
    double p_dev = 0.0;
    for (double v : p) p_dev += v;
    energy_.e_supply += (link_power(after) + p_sw_total) * dt_;
    energy_.e_device_loss += p_dev * dt_;
    energy_.e_link_loss += cfg_->link_resistance * i_sq * dt_;
    energy_.e_inductor = e_ind;
    energy_.e_circulated += 1.5 * std::hypot(ctl_.v_test.d, ctl_.v_test.q) * std::hypot(ctl_.i_meas.d, ctl_.i_meas.q) * dt_;
    energy_.time += dt_;

    std::array<double, k_devices> tj0 = t_j_;
    thermal_update(p, dt_);

    ++ticks_;
    const double theta1 = clock_.at(ticks_).theta;
    plant_ = after;

    // Protection on the end-of-step state.
    const double i_limit = sc_.overcurrent_factor * cfg_->i_ref_peak;
    for (int k = 0; k < 3; ++k) {
        if (std::abs(after.i_abc[k]) > i_limit) throw ProtectionTrip("overcurrent", time(), -1);
    }
    for (int d = 0; d < k_devices; ++d) {
        const auto info = device_info(d);
        const double i_dev = info.sign * after.i_abc[info.phase];
        if (frac_[d] > 0.0 && i_dev > 0.0) {
            const double v = desat_voltage(sense_[d].params(), i_dev * r[d]);
            const bool a = desat_mon_[d].update(desat_[d], time() - dt_, v);
            const bool b = desat_mon_[d].update(desat_[d], time(), v);
            if (a || b) throw ProtectionTrip("desat", time(), d);
        } else {
            desat_mon_[d].reset();
        }
    }

    if (armed_) {
        for (int d = 0; d < k_devices; ++d) capture(d, theta0, theta1, before, after, tj0, dt_);
    }
    peak_samples(theta0, theta1, tj0);
    if (theta1 < theta0) fundamental_boundary();
}

void Bench::idle_step() {
    const double dt = dt_ * sc_.idle_step_factor;
    const double theta0 = clock_.at(ticks_).theta;
    std::array<double, k_devices> tj0 = t_j_;
    std::array<double, k_devices> zero{};
    thermal_update(zero, dt);
    ticks_ += static_cast<std::uint64_t>(sc_.idle_step_factor);
    const double theta1 = clock_.at(ticks_).theta;
    if (++terms_age_ >= 8) refresh_terms();
    peak_samples(theta0, theta1, tj0);
    if (theta1 < theta0) fundamental_boundary();
}

void Bench::capture(int d, double theta0, double theta1, const PlantState& before, const PlantState& after,
                    const std::array<double, k_devices>& tj0, double dt) {
    auto& s = samplers_[d];
    const auto& set = triggers_[d];
    const auto& a = set.angles;
    const double x0 = unwrap_near(theta0, set.center);
    double span = theta1 - theta0;
    if (span < 0.0) span += k_two_pi;
    const double x1 = x0 + span;
    if (x1 < a.front() || x0 >= a.back()) return;

    const auto info = device_info(d);
    auto k = static_cast<int>(std::upper_bound(a.begin(), a.end(), x0) - a.begin());
    for (; k < static_cast<int>(a.size()) && a[k] <= x1; ++k) {
        if (!s.accepts(k)) continue;
        const double w = (a[k] - x0) / span;
        const double i_dev = info.sign * lerp(before.i_abc[info.phase], after.i_abc[info.phase], w);
        const double tj = lerp(tj0[d], t_j_[d], w);
        const double v_ds = on_state_voltage(d, i_dev, tj);
        SenseReading rd = sense_[d].sense_vds(v_ds, frac_[d] >= sc_.sampler.min_capture_duty, dt);
        if (!rd.valid) continue;
        // The per-channel diode mismatch is measured, so it is taken out here.
        rd.v_op1 = adc_dequantize(rd.adc_code, sense_[d].params()) - sense_[d].params().e_d;
        if (sampler_update(s, set, a[k], rd, i_dev)) {
            truth_r_[d][k] = r_on(dev_[d], tj, i_dev, cfg_->gate_on_v);
            truth_t_[d][k] = tj;
        }
    }

    if (!s.complete()) return;
    WindowEvent ev;
    ev.device = d;
    ev.time = time();
    const int center = s.size() / 2;
    ev.r_on_true = truth_r_[d][center];
    ev.t_j_true = truth_t_[d][center];
    ev.estimate = estimate_ron(s, taps_, sc_.sampler.i_floor);
    const auto tj = estimate_tj(ev.estimate.r_on, std::abs(ev.estimate.i_at_peak), lut_[d]);
    ev.t_j_estimate = tj.t_j;
    ev.out_of_grid = tj.out_of_grid;
    last_window_[d] = s;
    last_est_[d] = ev;
    s.clear();
    if (on_window) on_window(ev);
}

void Bench::peak_samples(double theta0, double theta1, const std::array<double, k_devices>& tj0) {
    if (!on_peak_sample) return;
    double span = theta1 - theta0;
    if (span < 0.0) span += k_two_pi;
    for (int d = 0; d < k_devices; ++d) {
        double x = peak_angle_[d] - theta0;
        if (x <= 0.0) x += k_two_pi;
        if (x <= span) on_peak_sample(d, lerp(tj0[d], t_j_[d], x / span));
    }
}

void Bench::fundamental_boundary() {
    for (auto& s : samplers_) s.next_cycle();
    if (converter_on_ && !armed_) {
        if (settle_left_ > 0) --settle_left_;
        if (settle_left_ == 0) {
            armed_ = true;
            for (auto& s : samplers_) s.clear();
        }
    }
    if (on_fundamental) on_fundamental();
}

void Bench::emit_waveform() {
    WaveformRow row;
    row.time = time();
    row.theta = theta();
    row.i_abc = plant_.i_abc;
    for (int d = 0; d < k_devices; ++d) {
        const auto info = device_info(d);
        const double i_dev = info.sign * plant_.i_abc[info.phase];
        row.v_ds[d] = converter_on_ ? on_state_voltage(d, i_dev, t_j_[d]) : 0.0;
        row.t_j[d] = t_j_[d];
    }
    on_waveform(row);
}

void Bench::cool_to_ambient(double tolerance) {
    set_converter(false);
    set_pump(0, true);
    set_pump(1, true);
    const double t_end = time() + sc_.max_phase_time;
    auto hottest = [&] {
        double m = -std::numeric_limits<double>::infinity();
        for (int d = 0; d < k_devices; ++d) m = std::max(m, t_j_[d] - cfg_->t_ambient);
        return m;
    };
    while (hottest() > tolerance) {
        if (time() > t_end) throw Error("devices did not return to ambient");
        step();
    }
}

std::array<double, k_devices> Bench::measure_vsd() {
    std::array<double, k_devices> out{};
    for (int d = 0; d < k_devices; ++d) {
        out[d] = sense_vsd(sc_.startup.i_vsd, dev_[d], t_j_[d], cfg_->gate_off_v, sense_[d].params()) -
                 sense_[d].params().e_d;
    }
    return out;
}

StartupResult Bench::startup_measurements() {
    if (converter_on_) throw Error("start-up measurements need an idle bench");
    StartupResult res;
    const double t_amb = cfg_->t_ambient;
    const double i_cal = sc_.startup.i_cal > 0.0 ? sc_.startup.i_cal : cfg_->i_ref_peak;
    const DeviceState fresh{sc_.device, {}, t_amb};
    const double v_th_fresh = v_th(fresh, t_amb);
    for (int d = 0; d < k_devices; ++d) {
        const double tj = t_j_[d];
        res.v_th[d] = measure_vth(dev_[d], tj, sense_[d].params());
        res.dv_th[d] = res.v_th[d] - v_th_fresh;

        const double v = on_state_voltage(d, i_cal, tj);
        double acc = 0.0;
        for (int k = 0; k < sc_.startup.readings; ++k) {
            const auto rd = sense_[d].sense_vds(v, true, 1e-5);
            acc += adc_dequantize(rd.adc_code, sense_[d].params()) - sense_[d].params().e_d;
        }
        sense_[d].reset();
        res.r_on_ambient[d] = acc / sc_.startup.readings / i_cal;

        lut_[d] = recalibrate_lut(fresh_lut_, res.r_on_ambient[d], t_amb, i_cal, res.dv_th[d], fresh);
        desat_[d] = compensate_desat_threshold(sc_.desat, res.dv_th[d], fresh);
    }
    res.v_sd = measure_vsd();
    return res;
}

}  // namespace acpc
