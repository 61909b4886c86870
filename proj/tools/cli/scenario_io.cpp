#include "scenario_io.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace acpc::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto p = s.find(sep, start);
        out.push_back(trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
        if (p == std::string_view::npos) break;
        start = p + 1;
    }
    return out;
}

template <class T>
T parse_number(const std::string& key, std::string_view text) {
    text = trim(text);
    T v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError(key, "cannot parse '" + std::string(text) + "' as a number");
    }
    return v;
}

void read_value(const std::string& key, std::string_view t, double& out) { out = parse_number<double>(key, t); }
void read_value(const std::string& key, std::string_view t, int& out) { out = parse_number<int>(key, t); }
void read_value(const std::string& key, std::string_view t, std::uint64_t& out) {
    out = parse_number<std::uint64_t>(key, t);
}
template <class T>
void read_value(const std::string& key, std::string_view t, std::optional<T>& out) {
    T v{};
    read_value(key, t, v);
    out = v;
}

std::string to_text(double v) { return format_double(v); }
std::string to_text(int v) { return std::to_string(v); }
std::string to_text(std::uint64_t v) { return std::to_string(v); }

template <class T>
std::optional<std::string> write_value(const T& v) {
    return to_text(v);
}
template <class T>
std::optional<std::string> write_value(const std::optional<T>& v) {
    if (!v) return std::nullopt;
    return to_text(*v);
}

using Setter = std::function<void(Scenario&, std::string_view)>;
using Getter = std::function<std::optional<std::string>(const Scenario&)>;

struct Field {
    std::string key;
    Setter set;
    Getter get;
};

// ref is a generic lambda returning a reference to the member for both
// const and mutable scenarios.
template <class Ref>
Field num(std::string key, Ref ref) {
    Setter set = [key, ref](Scenario& s, std::string_view t) { read_value(key, t, ref(s)); };
    Getter get = [ref](const Scenario& s) { return write_value(ref(s)); };
    return {std::move(key), std::move(set), std::move(get)};
}

template <class E, class Ref>
Field choice(std::string key, Ref ref, std::vector<std::pair<std::string_view, E>> names) {
    Setter set = [key, ref, names](Scenario& s, std::string_view t) {
        t = trim(t);
        for (const auto& [n, e] : names) {
            if (n == t) {
                ref(s) = e;
                return;
            }
        }
        std::string allowed;
        for (const auto& [n, e] : names) allowed += (allowed.empty() ? "" : ", ") + std::string(n);
        throw ConfigError(key, "expected one of " + allowed + ", got '" + std::string(t) + "'");
    };
    Getter get = [ref, names](const Scenario& s) -> std::optional<std::string> {
        for (const auto& [n, e] : names) {
            if (ref(s) == e) return std::string(n);
        }
        return std::nullopt;
    };
    return {std::move(key), std::move(set), std::move(get)};
}

// Degrees in the file; the radian value is written under a *_rad key when the
// degree text would not read back exactly.
template <class Ref, class Active>
void angle(std::vector<Field>& f, const std::string& stem, Ref ref, Active active) {
    auto deg_exact = [ref](const Scenario& s) {
        const double v = ref(s);
        return deg_to_rad(parse_number<double>("", format_double(rad_to_deg(v)))) == v;
    };
    f.push_back({stem + "_deg",
                 [stem, ref](Scenario& s, std::string_view t) { ref(s) = deg_to_rad(parse_number<double>(stem + "_deg", t)); },
                 [ref, active, deg_exact](const Scenario& s) -> std::optional<std::string> {
                     if (!active(s) || !deg_exact(s)) return std::nullopt;
                     return format_double(rad_to_deg(ref(s)));
                 }});
    f.push_back({stem + "_rad",
                 [stem, ref](Scenario& s, std::string_view t) { ref(s) = parse_number<double>(stem + "_rad", t); },
                 [ref, active, deg_exact](const Scenario& s) -> std::optional<std::string> {
                     if (!active(s) || deg_exact(s)) return std::nullopt;
                     return format_double(ref(s));
                 }});
}

using Pairs = std::vector<std::pair<std::uint64_t, double>>;

Pairs parse_pairs(const std::string& key, std::string_view text) {
    Pairs out;
    if (trim(text).empty()) return out;
    for (auto item : split(text, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 2) throw ConfigError(key, "expected cycle:value items, got '" + std::string(item) + "'");
        out.emplace_back(parse_number<std::uint64_t>(key, parts[0]), parse_number<double>(key, parts[1]));
    }
    return out;
}

std::string write_pairs(const Pairs& p) {
    std::string out;
    for (const auto& [c, v] : p) {
        if (!out.empty()) out += ", ";
        out += std::to_string(c) + ":" + format_double(v);
    }
    return out;
}

void mechanism(std::vector<Field>& f, const std::string& name, MechanismTrajectory AgingTrajectory::*m) {
    const std::string base = "aging." + name;
    f.push_back({base + ".ramp", [base, m](Scenario& s, std::string_view t) { (s.aging.*m).ramp = parse_pairs(base + ".ramp", t); },
                 [m](const Scenario& s) -> std::optional<std::string> {
                     if ((s.aging.*m).ramp.empty()) return std::nullopt;
                     return write_pairs((s.aging.*m).ramp);
                 }});
    f.push_back({base + ".steps", [base, m](Scenario& s, std::string_view t) { (s.aging.*m).steps = parse_pairs(base + ".steps", t); },
                 [m](const Scenario& s) -> std::optional<std::string> {
                     if ((s.aging.*m).steps.empty()) return std::nullopt;
                     return write_pairs((s.aging.*m).steps);
                 }});
    f.push_back({base + ".knee",
                 [base, m](Scenario& s, std::string_view t) {
                     const auto key = base + ".knee";
                     if (trim(t).empty()) {
                         (s.aging.*m).knee.reset();
                         return;
                     }
                     const auto parts = split(t, ':');
                     if (parts.size() != 3) throw ConfigError(key, "expected start:end:extra");
                     (s.aging.*m).knee = Knee{parse_number<std::uint64_t>(key, parts[0]),
                                              parse_number<std::uint64_t>(key, parts[1]),
                                              parse_number<double>(key, parts[2])};
                 },
                 [m](const Scenario& s) -> std::optional<std::string> {
                     const auto& k = (s.aging.*m).knee;
                     if (!k) return std::nullopt;
                     return std::to_string(k->start) + ":" + std::to_string(k->end) + ":" + format_double(k->extra);
                 }});
}

#define ACPC_REF(expr) [](auto& s) -> auto& { return s.expr; }

std::vector<Field> build_fields() {
    std::vector<Field> f;
    f.push_back(num("v_dc", ACPC_REF(bench.v_dc)));
    f.push_back(num("f_sw", ACPC_REF(bench.f_sw)));
    f.push_back(num("f_fund", ACPC_REF(bench.f_fund)));
    f.push_back(num("modulation_index", ACPC_REF(bench.modulation_index)));
    f.push_back(choice<PfMode>("pf_mode", ACPC_REF(bench.pf_mode),
                               {{"motor", PfMode::Motor}, {"generator", PfMode::Generator}, {"custom", PfMode::Custom}}));
    angle(f, "pf_angle", ACPC_REF(bench.pf_angle), [](const Scenario& s) { return s.bench.pf_mode == PfMode::Custom; });
    f.push_back(num("i_ref_peak", ACPC_REF(bench.i_ref_peak)));
    f.push_back(num("link_inductance", ACPC_REF(bench.link_inductance)));
    f.push_back(num("link_resistance", ACPC_REF(bench.link_resistance)));
    f.push_back(num("dc_link_capacitance", ACPC_REF(bench.dc_link_capacitance)));
    f.push_back(num("gate_on_v", ACPC_REF(bench.gate_on_v)));
    f.push_back(num("gate_off_v", ACPC_REF(bench.gate_off_v)));
    f.push_back(num("t_ambient", ACPC_REF(bench.t_ambient)));
    f.push_back(choice<Technique>("technique", ACPC_REF(bench.technique),
                                  {{"fixed_times", Technique::FixedTimes},
                                   {"case_swing", Technique::CaseSwing},
                                   {"junction_swing", Technique::JunctionSwing}}));
    f.push_back(num("t_on", ACPC_REF(bench.t_on)));
    f.push_back(num("t_off", ACPC_REF(bench.t_off)));
    f.push_back(num("t_case_max", ACPC_REF(bench.t_case_max)));
    f.push_back(num("t_case_min", ACPC_REF(bench.t_case_min)));
    f.push_back(num("t_j_max", ACPC_REF(bench.t_j_max)));
    f.push_back(num("t_j_min", ACPC_REF(bench.t_j_min)));
    f.push_back(num("n_cycles", ACPC_REF(bench.n_cycles)));
    f.push_back(num("rng_seed", ACPC_REF(bench.rng_seed)));
    f.push_back(choice<PlantMode>("plant_mode", ACPC_REF(bench.plant_mode),
                                  {{"averaged", PlantMode::Averaged}, {"switched", PlantMode::Switched}}));
    f.push_back(num("steps_per_pwm", ACPC_REF(bench.steps_per_pwm)));

    f.push_back({"device.profile",
                 [](Scenario& s, std::string_view t) {
                     t = trim(t);
                     if (t == "module") s.device = module_profile();
                     else if (t == "vendor_a") s.device = vendor_a_profile();
                     else if (t == "vendor_b") s.device = vendor_b_profile();
                     else throw ConfigError("device.profile", "expected module, vendor_a or vendor_b");
                 },
                 [](const Scenario&) { return std::optional<std::string>{}; }});
    f.push_back(num("device.r_drift0", ACPC_REF(device.r_drift0)));
    f.push_back(num("device.alpha_drift", ACPC_REF(device.alpha_drift)));
    f.push_back(num("device.k_ch", ACPC_REF(device.k_ch)));
    f.push_back(num("device.v_th0", ACPC_REF(device.v_th0)));
    f.push_back(num("device.rho_vth", ACPC_REF(device.rho_vth)));
    f.push_back(num("device.v_j0", ACPC_REF(device.v_j0)));
    f.push_back(num("device.rho_sd_lo", ACPC_REF(device.rho_sd_lo)));
    f.push_back(num("device.rho_sd_hi", ACPC_REF(device.rho_sd_hi)));
    f.push_back(num("device.r_diode", ACPC_REF(device.r_diode)));
    f.push_back(num("device.e_on0", ACPC_REF(device.e_on0)));
    f.push_back(num("device.e_off0", ACPC_REF(device.e_off0)));
    f.push_back(num("device.v_ref_sw", ACPC_REF(device.v_ref_sw)));
    f.push_back(num("device.i_ref_sw", ACPC_REF(device.i_ref_sw)));
    f.push_back(num("device.t0", ACPC_REF(device.t0)));
    f.push_back(num("device.i_nominal", ACPC_REF(device.i_nominal)));
    f.push_back(num("device.rho_i", ACPC_REF(device.rho_i)));

    f.push_back({"thermal.stages",
                 [](Scenario& s, std::string_view t) {
                     std::vector<FosterStage> st;
                     for (auto item : split(t, ',')) {
                         const auto parts = split(item, ':');
                         if (parts.size() != 2) throw ConfigError("thermal.stages", "expected r_th:c_th items");
                         st.push_back({parse_number<double>("thermal.stages", parts[0]),
                                       parse_number<double>("thermal.stages", parts[1])});
                     }
                     s.thermal.stages = std::move(st);
                 },
                 [](const Scenario& s) -> std::optional<std::string> {
                     std::string out;
                     for (const auto& st : s.thermal.stages) {
                         if (!out.empty()) out += ", ";
                         out += format_double(st.r_th) + ":" + format_double(st.c_th);
                     }
                     return out;
                 }});
    f.push_back(num("thermal.r_th_aging_factor", ACPC_REF(thermal.r_th_aging_factor)));
    f.push_back(num("thermal.ntc_bias", ACPC_REF(thermal.ntc_bias)));
    f.push_back(num("thermal.ntc_tau", ACPC_REF(thermal.ntc_tau)));
    f.push_back(num("cooling.r_boundary_on", ACPC_REF(thermal.cooling.r_boundary_on)));
    f.push_back(num("cooling.r_boundary_off", ACPC_REF(thermal.cooling.r_boundary_off)));
    f.push_back(num("cooling.max_heat", ACPC_REF(thermal.cooling.max_heat)));
    f.push_back(num("cooling.coolant_capacity", ACPC_REF(thermal.cooling.coolant_capacity)));

    mechanism(f, "pkg", &AgingTrajectory::pkg);
    mechanism(f, "vth", &AgingTrajectory::vth);
    mechanism(f, "vsd", &AgingTrajectory::vsd);

    f.push_back(num("sense.i_desat", ACPC_REF(sense.i_desat)));
    f.push_back(num("sense.i_desat_vth", ACPC_REF(sense.i_desat_vth)));
    f.push_back(num("sense.r_s", ACPC_REF(sense.r_s)));
    f.push_back(num("sense.r_a1", ACPC_REF(sense.r_a1)));
    f.push_back(num("sense.r_a2", ACPC_REF(sense.r_a2)));
    f.push_back(num("sense.v_d_hv", ACPC_REF(sense.v_d_hv)));
    f.push_back(num("sense.rc_filter_tau", ACPC_REF(sense.rc_filter_tau)));
    f.push_back(num("sense.shift_offset", ACPC_REF(sense.shift_offset)));
    f.push_back(num("sense.shift_gain", ACPC_REF(sense.shift_gain)));
    f.push_back(num("sense.adc_bits", ACPC_REF(sense.adc_bits)));
    f.push_back(num("sense.adc_fullscale", ACPC_REF(sense.adc_fullscale)));
    f.push_back(num("sense.noise_sigma", ACPC_REF(sense.noise_sigma)));
    f.push_back(num("sense.c_gs", ACPC_REF(sense.c_gs)));
    f.push_back(num("sense.vth_blanking", ACPC_REF(sense.vth_blanking)));
    f.push_back(num("sense.vth_slope", ACPC_REF(sense.vth_slope)));
    f.push_back(num("sense.vth_compliance", ACPC_REF(sense.vth_compliance)));
    f.push_back(num("sense.vth_timeout", ACPC_REF(sense.vth_timeout)));
    f.push_back(num("sense.vth_shift_gain", ACPC_REF(sense.vth_shift_gain)));
    f.push_back(num("sense.vth_shift_offset", ACPC_REF(sense.vth_shift_offset)));

    f.push_back(num("desat.threshold", ACPC_REF(desat.threshold)));
    f.push_back(num("desat.blanking", ACPC_REF(desat.blanking)));

    f.push_back(num("sampler.n", ACPC_REF(sampler.n)));
    angle(f, "sampler.window", ACPC_REF(sampler.window), [](const Scenario&) { return true; });
    f.push_back(num("sampler.budget", ACPC_REF(sampler.budget)));
    f.push_back(choice<CaptureMode>("sampler.mode", ACPC_REF(sampler.mode),
                                    {{"out_of_order", CaptureMode::OutOfOrder}, {"sequential", CaptureMode::Sequential}}));
    f.push_back(num("sampler.fir_taps", ACPC_REF(sampler.fir_taps)));
    f.push_back(num("sampler.fir_cutoff", ACPC_REF(sampler.fir_cutoff)));
    f.push_back(num("sampler.i_floor", ACPC_REF(sampler.i_floor)));
    f.push_back(num("sampler.settle_cycles", ACPC_REF(sampler.settle_cycles)));
    f.push_back(num("sampler.min_capture_duty", ACPC_REF(sampler.min_capture_duty)));

    f.push_back(num("warn.r_on_rel", ACPC_REF(warnings.r_on_rel_threshold)));
    f.push_back(num("warn.v_th_shift", ACPC_REF(warnings.v_th_shift_threshold)));
    f.push_back(num("warn.v_sd_shift", ACPC_REF(warnings.v_sd_shift_threshold)));

    f.push_back(num("startup.interval", ACPC_REF(startup.interval)));
    f.push_back(num("startup.i_cal", ACPC_REF(startup.i_cal)));
    f.push_back(num("startup.readings", ACPC_REF(startup.readings)));
    f.push_back(num("startup.cooldown_tolerance", ACPC_REF(startup.cooldown_tolerance)));
    f.push_back(num("startup.i_vsd", ACPC_REF(startup.i_vsd)));

    f.push_back(num("run.sense_current", ACPC_REF(sense_current)));
    f.push_back(num("run.overcurrent_factor", ACPC_REF(overcurrent_factor)));
    f.push_back(num("run.t_j_limit", ACPC_REF(t_j_limit)));
    f.push_back(num("run.idle_step_factor", ACPC_REF(idle_step_factor)));
    f.push_back(num("run.max_phase_time", ACPC_REF(max_phase_time)));
    f.push_back(num("run.waveform_decimation", ACPC_REF(waveform_decimation)));
    return f;
}

#undef ACPC_REF

const std::vector<Field>& fields() {
    static const std::vector<Field> f = build_fields();
    return f;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

std::vector<std::string> scenario_keys() {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
}

Scenario parse_scenario(std::string_view text) {
    std::map<std::string_view, const Field*> index;
    for (const auto& f : fields()) index.emplace(f.key, &f);

    std::vector<std::pair<const Field*, std::string_view>> assignments;
    std::map<std::string_view, int> seen;
    int line_no = 0;
    for (auto line : split(text, '\n')) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no), "expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        const auto it = index.find(key);
        if (it == index.end()) throw ConfigError(std::string(key), "unknown key");
        if (const auto [pos, fresh] = seen.emplace(key, line_no); !fresh) {
            throw ConfigError(std::string(key), "repeated on lines " + std::to_string(pos->second) + " and " +
                                                    std::to_string(line_no));
        }
        assignments.emplace_back(it->second, trim(line.substr(eq + 1)));
    }

    Scenario s;
    // A device profile is a base that individual device keys then override.
    for (const auto& [f, v] : assignments) {
        if (f->key == "device.profile") f->set(s, v);
    }
    for (const auto& [f, v] : assignments) {
        if (f->key != "device.profile") f->set(s, v);
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), "cannot open scenario file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& s) {
    std::string out;
    for (const auto& f : fields()) {
        if (auto v = f.get(s)) out += f.key + " = " + *v + "\n";
    }
    return out;
}

}  // namespace acpc::cli
