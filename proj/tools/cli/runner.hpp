#pragma once

#include "acpc/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace acpc::cli {

enum class Emit { Precursors, Waveforms, Both };

struct RunOptions {
    std::filesystem::path scenario;
    std::filesystem::path out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> cycles;
    std::optional<PlantMode> mode;
    Emit emit = Emit::Precursors;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 2;
inline constexpr int aborted = 3;
}  // namespace exit_code

struct RunResult {
    int exit_code = exit_code::ok;
    std::uint64_t cycles_completed = 0;
    std::string message;
};

/// validate -> start-up measurements -> cycle loop, writing into out_dir.
/// Configuration errors are reported before anything is written. A protection
/// trip, thermal runaway or stalled phase keeps the rows written so far.
RunResult run_scenario(const RunOptions& opt, std::ostream& diag);

}  // namespace acpc::cli
