#pragma once

// Tidy x,y,series CSV extracts of a finished run directory.
//
//   thermal_cycle   time_s, tj_c per IUT device (waveforms.csv, else the
//                   per-cycle max/min sawtooth from precursors.csv)
//   ron_trend       cycle_index, r_on_mohm per device
//   vth_trend       cycle_index, v_th_v per device, start-up cycles only
//   sampling_trace  slot, r_mohm, series raw/filtered for one device

#include <filesystem>
#include <string>
#include <string_view>

namespace acpc::cli {

/// Throws UnknownKind for an unrecognized kind and Error when the run
/// directory lacks the file the kind needs.
[[nodiscard]] std::string export_plotdata(const std::filesystem::path& run_dir, std::string_view kind, int device = 0);

}  // namespace acpc::cli
