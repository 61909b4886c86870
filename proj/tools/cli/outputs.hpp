#pragma once

// CSV writers for run outputs and the run manifest.
//
// Numbers are written with six decimals; missing values are empty fields.

#include "acpc/cycling.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace acpc::cli {

inline constexpr const char* k_precursors_header =
    "cycle_index,t_start_s,device_id,r_on_mohm,v_th_v,v_sd_v,tj_max_c,tj_min_c,delta_tj_c,t_on_s,t_off_s,warnings";

[[nodiscard]] std::string fixed6(double v);

/// One row per device.
void write_precursor_rows(std::ostream& out, const CycleRecord& rec);

[[nodiscard]] std::string waveform_header();
void write_waveform_row(std::ostream& out, const WaveformRow& row);

[[nodiscard]] std::string windows_header();
void write_window_row(std::ostream& out, const WindowEvent& ev);

/// Raw and filtered per-slot resistance of the last completed window of each device.
void write_last_windows(std::ostream& out, const Bench& bench);

/// Hex SHA-256 of a file's bytes.
[[nodiscard]] std::string sha256_file(const std::filesystem::path& p);

struct ManifestInfo {
    std::filesystem::path scenario;
    std::filesystem::path out_dir;
    std::uint64_t seed = 0;
    std::uint64_t cycles_completed = 0;
    double wall_clock_s = 0.0;
    std::string status;  ///< "completed" or "aborted"
    std::string message;
    std::vector<std::string> files;  ///< names relative to out_dir
};

/// Writes manifest.json into out_dir with a hash for every listed file.
void write_manifest(const ManifestInfo& m);

}  // namespace acpc::cli
