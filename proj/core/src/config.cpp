#include "acpc/config.hpp"

#include <string>

namespace acpc {

std::string_view to_string(PfMode m) {
    switch (m) {
        case PfMode::Motor: return "motor";
        case PfMode::Generator: return "generator";
        case PfMode::Custom: return "custom";
    }
    return "?";
}

std::string_view to_string(Technique t) {
    switch (t) {
        case Technique::FixedTimes: return "fixed_times";
        case Technique::CaseSwing: return "case_swing";
        case Technique::JunctionSwing: return "junction_swing";
    }
    return "?";
}

std::string_view to_string(PlantMode m) {
    switch (m) {
        case PlantMode::Averaged: return "averaged";
        case PlantMode::Switched: return "switched";
    }
    return "?";
}

namespace {

void require(bool ok, const char* field, const std::string& reason) {
    if (!ok) throw ConfigError(field, reason);
}

void require_finite(double v, const char* field) {
    require(std::isfinite(v), field, "must be finite");
}

double required(const std::optional<double>& v, const char* field, std::string_view technique) {
    if (!v) throw ConfigError(field, "required by technique " + std::string(technique));
    require_finite(*v, field);
    return *v;
}

}  // namespace

ValidatedConfig validate_scenario(const BenchConfig& in) {
    BenchConfig c = in;

    for (auto [v, name] : {std::pair{c.v_dc, "v_dc"}, {c.f_sw, "f_sw"}, {c.f_fund, "f_fund"},
                           {c.modulation_index, "modulation_index"}, {c.i_ref_peak, "i_ref_peak"},
                           {c.link_inductance, "link_inductance"}, {c.link_resistance, "link_resistance"},
                           {c.dc_link_capacitance, "dc_link_capacitance"}, {c.gate_on_v, "gate_on_v"},
                           {c.gate_off_v, "gate_off_v"}, {c.t_ambient, "t_ambient"}, {c.pf_angle, "pf_angle"}}) {
        require_finite(v, name);
    }

    require(c.v_dc > 0.0, "v_dc", "must be positive");
    require(c.f_fund > 0.0, "f_fund", "must be positive");
    require(c.f_sw > 10.0 * c.f_fund, "f_sw", "must exceed 10 x f_fund");
    require(c.modulation_index >= 0.0 && c.modulation_index <= 1.0, "modulation_index", "must lie in [0, 1]");
    require(c.i_ref_peak > 0.0, "i_ref_peak", "must be positive");
    require(c.link_inductance > 0.0, "link_inductance", "must be positive");
    require(c.link_resistance >= 0.0, "link_resistance", "must be non-negative");
    require(c.dc_link_capacitance >= 0.0, "dc_link_capacitance", "must be non-negative");
    require(c.gate_on_v > 0.0, "gate_on_v", "must be positive");
    require(c.gate_off_v < c.gate_on_v, "gate_off_v", "must be below gate_on_v");
    require(c.t_ambient > -40.0 && c.t_ambient < 200.0, "t_ambient", "outside the [-40, 200] C envelope");
    require(c.n_cycles >= 1, "n_cycles", "must be at least 1");

    switch (c.pf_mode) {
        case PfMode::Motor: c.pf_angle = 0.0; break;
        case PfMode::Generator: c.pf_angle = std::numbers::pi; break;
        case PfMode::Custom:
            require(c.pf_angle > -std::numbers::pi && c.pf_angle <= std::numbers::pi, "pf_angle",
                    "must lie in (-180, 180] degrees");
            break;
    }

    if (!c.steps_per_pwm) c.steps_per_pwm = (c.plant_mode == PlantMode::Averaged) ? 1 : 64;
    if (c.plant_mode == PlantMode::Averaged) {
        require(*c.steps_per_pwm == 1, "steps_per_pwm", "averaged mode integrates once per PWM period");
    } else {
        require(*c.steps_per_pwm >= 8 && *c.steps_per_pwm % 2 == 0, "steps_per_pwm",
                "switched mode needs an even count of at least 8");
    }

    const auto tech = to_string(c.technique);
    switch (c.technique) {
        case Technique::FixedTimes: {
            const double on = required(c.t_on, "t_on", tech);
            const double off = required(c.t_off, "t_off", tech);
            require(on > 0.0, "t_on", "must be positive");
            require(off > 0.0, "t_off", "must be positive");
            c.t_case_max = c.t_case_min = c.t_j_max = c.t_j_min = std::nullopt;
            break;
        }
        case Technique::CaseSwing: {
            const double hi = required(c.t_case_max, "t_case_max", tech);
            const double lo = required(c.t_case_min, "t_case_min", tech);
            require(hi > lo, "t_case_max", "must exceed t_case_min");
            require(lo > c.t_ambient, "t_case_min", "must exceed t_ambient");
            c.t_on = c.t_off = c.t_j_max = c.t_j_min = std::nullopt;
            break;
        }
        case Technique::JunctionSwing: {
            const double hi = required(c.t_j_max, "t_j_max", tech);
            const double lo = required(c.t_j_min, "t_j_min", tech);
            require(hi > lo, "t_j_max", "must exceed t_j_min");
            require(lo > c.t_ambient, "t_j_min", "must exceed t_ambient");
            require(hi < 200.0, "t_j_max", "outside the 200 C envelope");
            c.t_on = c.t_off = c.t_case_max = c.t_case_min = std::nullopt;
            break;
        }
    }

    return ValidatedConfig(std::move(c));
}

}  // namespace acpc
