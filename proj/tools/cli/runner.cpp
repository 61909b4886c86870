#include "runner.hpp"

#include "outputs.hpp"
#include "scenario_io.hpp"

#include <chrono>
#include <fstream>
#include <vector>

namespace acpc::cli {

namespace {

std::ofstream open_csv(const std::filesystem::path& p, const std::string& header) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot create " + p.string());
    out << header << '\n';
    return out;
}

}  // namespace

RunResult run_scenario(const RunOptions& opt, std::ostream& diag) {
    const auto start = std::chrono::steady_clock::now();
    RunResult res;

    std::optional<ValidatedScenario> vs;
    try {
        Scenario sc = load_scenario(opt.scenario);
        if (opt.seed) sc.bench.rng_seed = *opt.seed;
        if (opt.cycles) sc.bench.n_cycles = *opt.cycles;
        if (opt.mode && *opt.mode != sc.bench.plant_mode) {
            sc.bench.plant_mode = *opt.mode;
            sc.bench.steps_per_pwm.reset();
        }
        vs = validate(sc);
    } catch (const ConfigError& e) {
        diag << opt.scenario.string() << ": " << e.what() << '\n';
        res.exit_code = exit_code::config;
        res.message = e.what();
        return res;
    }
    const auto& cfg = vs->config().config();

    std::filesystem::create_directories(opt.out_dir);
    ManifestInfo manifest;
    manifest.scenario = opt.scenario;
    manifest.out_dir = opt.out_dir;
    manifest.seed = cfg.rng_seed;

    {
        std::ofstream resolved(opt.out_dir / "scenario_resolved.cfg", std::ios::binary);
        resolved << serialize_scenario(vs->scenario());
        manifest.files.push_back("scenario_resolved.cfg");
    }

    const bool want_pre = opt.emit != Emit::Waveforms;
    const bool want_wave = opt.emit != Emit::Precursors;
    std::ofstream pre, wave, win;
    if (want_pre) {
        pre = open_csv(opt.out_dir / "precursors.csv", k_precursors_header);
        manifest.files.push_back("precursors.csv");
    }
    if (want_wave) {
        wave = open_csv(opt.out_dir / "waveforms.csv", waveform_header());
        win = open_csv(opt.out_dir / "windows.csv", windows_header());
        manifest.files.push_back("waveforms.csv");
        manifest.files.push_back("windows.csv");
    }

    Bench bench(*vs);
    Campaign campaign(bench);
    if (want_pre) {
        campaign.on_record = [&](const CycleRecord& r) {
            write_precursor_rows(pre, r);
            pre.flush();
        };
    }
    if (want_wave) {
        bench.on_waveform = [&](const WaveformRow& row) { write_waveform_row(wave, row); };
        bench.on_window = [&](const WindowEvent& ev) { write_window_row(win, ev); };
    }

    try {
        campaign.run(cfg.n_cycles);
        manifest.status = "completed";
    } catch (const Error& e) {
        res.exit_code = exit_code::aborted;
        res.message = e.what();
        manifest.status = "aborted";
        manifest.message = e.what();
        diag << opt.scenario.string() << ": run ended early after " << campaign.records().size()
             << " cycles: " << e.what();
        if (const auto* trip = dynamic_cast<const ProtectionTrip*>(&e)) {
            diag << " (device " << trip->device() << ", t = " << trip->time_s() << " s)";
        } else if (const auto* hot = dynamic_cast<const ThermalRunaway*>(&e)) {
            diag << " (device " << hot->device() << ", t = " << hot->time_s() << " s)";
        }
        diag << '\n';
    }
    res.cycles_completed = campaign.records().size();

    {
        std::ofstream lw(opt.out_dir / "last_windows.csv", std::ios::binary);
        write_last_windows(lw, bench);
        manifest.files.push_back("last_windows.csv");
    }
    pre.close();
    wave.close();
    win.close();

    manifest.cycles_completed = res.cycles_completed;
    manifest.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(manifest);
    return res;
}

}  // namespace acpc::cli
