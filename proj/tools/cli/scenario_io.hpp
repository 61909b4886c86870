#pragma once

// Flat key=value scenario files.
//
//   # comment
//   v_dc = 800
//   technique = junction_swing
//   device.r_drift0 = 1.975e-3
//   aging.pkg.ramp = 2000:0.2
//   thermal.stages = 0.02:0.05, 0.06:0.5
//
// Bench keys are bare; everything else is dotted by module. Angles are given
// in degrees (pf_angle_deg, sampler.window_deg). Unknown or repeated keys are
// rejected with ConfigError naming the key.

#include "acpc/bench.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace acpc::cli {

/// Syntax-level parse; semantic checks are left to acpc::validate.
[[nodiscard]] Scenario parse_scenario(std::string_view text);

/// Reads and parses a scenario file. Throws ConfigError if it cannot be read.
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);

/// Every key with its current value; parse_scenario reads it back unchanged.
[[nodiscard]] std::string serialize_scenario(const Scenario& s);

/// All keys accepted by parse_scenario, in serialization order.
[[nodiscard]] std::vector<std::string> scenario_keys();

/// Shortest decimal text that reads back as the same double.
[[nodiscard]] std::string format_double(double v);

}  // namespace acpc::cli
