#include "outputs.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>

namespace acpc::cli {

std::string fixed6(double v) {
    if (!std::isfinite(v)) return {};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    // Avoid "-0.000000" so equal runs stay byte-identical regardless of sign noise.
    if (std::string_view(buf) == "-0.000000") return "0.000000";
    return buf;
}

namespace {

std::string opt6(const std::optional<double>& v, double scale = 1.0) { return v ? fixed6(*v * scale) : std::string{}; }

}  // namespace

void write_precursor_rows(std::ostream& out, const CycleRecord& rec) {
    for (int d = 0; d < k_devices; ++d) {
        const auto& r = rec.devices[d];
        out << rec.cycle_index << ',' << fixed6(rec.t_start) << ',' << d << ',' << opt6(r.r_on_est, 1e3) << ','
            << opt6(r.v_th) << ',' << opt6(r.v_sd) << ',' << fixed6(r.t_j_max) << ',' << fixed6(r.t_j_min) << ','
            << fixed6(r.delta_t_j) << ',' << fixed6(rec.t_on_actual) << ',' << fixed6(rec.t_off_actual) << ','
            << warning_string(r.warnings) << '\n';
    }
}

std::string waveform_header() {
    std::string h = "time_s,theta_rad,i_a_a,i_b_a,i_c_a";
    for (int d = 0; d < k_devices; ++d) h += ",v_ds_" + std::to_string(d) + "_v";
    for (int d = 0; d < k_devices; ++d) h += ",tj_" + std::to_string(d) + "_c";
    return h;
}

void write_waveform_row(std::ostream& out, const WaveformRow& row) {
    out << fixed6(row.time) << ',' << fixed6(row.theta);
    for (double i : row.i_abc) out << ',' << fixed6(i);
    for (double v : row.v_ds) out << ',' << fixed6(v);
    for (double t : row.t_j) out << ',' << fixed6(t);
    out << '\n';
}

std::string windows_header() { return "time_s,device_id,r_on_mohm,i_peak_a,tj_est_c,out_of_grid"; }

void write_window_row(std::ostream& out, const WindowEvent& ev) {
    out << fixed6(ev.time) << ',' << ev.device << ',' << fixed6(ev.estimate.r_on * 1e3) << ','
        << fixed6(ev.estimate.i_at_peak) << ',' << fixed6(ev.t_j_estimate) << ',' << (ev.out_of_grid ? 1 : 0) << '\n';
}

void write_last_windows(std::ostream& out, const Bench& bench) {
    out << "device_id,slot,theta_rad,v_on_v,i_a,r_raw_mohm,r_filtered_mohm\n";
    for (int d = 0; d < k_devices; ++d) {
        const auto& w = bench.last_window(d);
        if (!w) continue;
        const auto trace = ron_trace(*w, bench.taps(), bench.scenario().sampler.i_floor);
        const auto& angles = bench.triggers(d).angles;
        for (int k = 0; k < w->size(); ++k) {
            const auto& slot = w->slots()[k];
            const double theta = k < static_cast<int>(angles.size()) ? angles[k] : std::nan("");
            out << d << ',' << k << ',' << fixed6(theta) << ',' << (slot ? fixed6(slot->v_on) : "") << ','
                << (slot ? fixed6(slot->i) : "") << ',' << fixed6(trace.raw[k] * 1e3) << ','
                << fixed6(trace.filtered[k] * 1e3) << '\n';
        }
    }
}

std::string sha256_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha256 unavailable");
    }
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

void write_manifest(const ManifestInfo& m) {
    nlohmann::ordered_json j;
    j["scenario"] = m.scenario.string();
    j["output_dir"] = m.out_dir.string();
    j["seed"] = m.seed;
    j["status"] = m.status;
    if (!m.message.empty()) j["message"] = m.message;
    j["cycles_completed"] = m.cycles_completed;
    j["wall_clock_s"] = m.wall_clock_s;
    auto files = nlohmann::ordered_json::array();
    for (const auto& name : m.files) {
        const auto path = m.out_dir / name;
        files.push_back({{"name", name},
                         {"bytes", std::filesystem::file_size(path)},
                         {"sha256", sha256_file(path)}});
    }
    j["files"] = std::move(files);
    std::ofstream out(m.out_dir / "manifest.json", std::ios::binary);
    out << j.dump(2) << '\n';
    if (!out) throw Error("cannot write manifest.json");
}

}  // namespace acpc::cli
