#include "plotdata.hpp"

#include "outputs.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace acpc::cli {

namespace {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] std::size_t col(const std::string& name) const {
        for (std::size_t k = 0; k < header.size(); ++k) {
            if (header[k] == name) return k;
        }
        throw Error("column " + name + " missing");
    }
};

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

Table read_table(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("run directory has no " + p.filename().string());
    Table t;
    std::string line;
    if (std::getline(in, line)) t.header = split_csv(line);
    while (std::getline(in, line)) {
        if (!line.empty()) t.rows.push_back(split_csv(line));
    }
    return t;
}

double num(const std::string& s) { return std::stod(s); }

std::string series(int d) { return "device_" + std::to_string(d); }

std::string thermal_cycle(const std::filesystem::path& dir) {
    std::ostringstream out;
    out << "time_s,tj_c,series\n";
    if (std::filesystem::exists(dir / "waveforms.csv")) {
        const Table t = read_table(dir / "waveforms.csv");
        const auto c_time = t.col("time_s");
        for (int d = 0; d < k_iut_devices; ++d) {
            const auto c = t.col("tj_" + std::to_string(d) + "_c");
            for (const auto& r : t.rows) out << r[c_time] << ',' << r[c] << ',' << series(d) << '\n';
        }
        return out.str();
    }
    const Table t = read_table(dir / "precursors.csv");
    const auto c_dev = t.col("device_id"), c_start = t.col("t_start_s"), c_on = t.col("t_on_s"),
               c_off = t.col("t_off_s"), c_max = t.col("tj_max_c"), c_min = t.col("tj_min_c");
    for (int d = 0; d < k_iut_devices; ++d) {
        for (const auto& r : t.rows) {
            if (std::stoi(r[c_dev]) != d) continue;
            const double t0 = num(r[c_start]), t_on = num(r[c_on]), t_off = num(r[c_off]);
            out << fixed6(t0 + t_on) << ',' << r[c_max] << ',' << series(d) << '\n';
            out << fixed6(t0 + t_on + t_off) << ',' << r[c_min] << ',' << series(d) << '\n';
        }
    }
    return out.str();
}

std::string per_cycle(const std::filesystem::path& dir, const std::string& column) {
    const Table t = read_table(dir / "precursors.csv");
    const auto c_cycle = t.col("cycle_index"), c_dev = t.col("device_id"), c_val = t.col(column);
    std::ostringstream out;
    out << "cycle_index," << column << ",series\n";
    for (int d = 0; d < k_devices; ++d) {
        for (const auto& r : t.rows) {
            if (std::stoi(r[c_dev]) != d || c_val >= r.size() || r[c_val].empty()) continue;
            out << r[c_cycle] << ',' << r[c_val] << ',' << series(d) << '\n';
        }
    }
    return out.str();
}

std::string sampling_trace(const std::filesystem::path& dir, int device) {
    const Table t = read_table(dir / "last_windows.csv");
    const auto c_dev = t.col("device_id"), c_slot = t.col("slot"), c_raw = t.col("r_raw_mohm"),
               c_filt = t.col("r_filtered_mohm");
    std::ostringstream raw, filt;
    int n = 0;
    for (const auto& r : t.rows) {
        if (std::stoi(r[c_dev]) != device) continue;
        raw << r[c_slot] << ',' << r[c_raw] << ",raw\n";
        filt << r[c_slot] << ',' << (c_filt < r.size() ? r[c_filt] : "") << ",filtered\n";
        ++n;
    }
    if (n == 0) throw Error("no completed sampling window for device " + std::to_string(device));
    return "slot,r_on_mohm,series\n" + raw.str() + filt.str();
}

}  // namespace

std::string export_plotdata(const std::filesystem::path& run_dir, std::string_view kind, int device) {
    if (kind == "thermal_cycle") return thermal_cycle(run_dir);
    if (kind == "ron_trend") return per_cycle(run_dir, "r_on_mohm");
    if (kind == "vth_trend") return per_cycle(run_dir, "v_th_v");
    if (kind == "sampling_trace") return sampling_trace(run_dir, device);
    throw UnknownKind("unknown plot kind '" + std::string(kind) +
                      "' (expected thermal_cycle, ron_trend, vth_trend or sampling_trace)");
}

}  // namespace acpc::cli
