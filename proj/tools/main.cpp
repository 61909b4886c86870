#include "cli/plotdata.hpp"
#include "cli/runner.hpp"
#include "cli/scenario_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

namespace {

using namespace acpc::cli;

int run_many(const std::vector<std::string>& files, const RunOptions& base, unsigned jobs) {
    std::vector<int> codes(files.size(), 0);
    std::mutex log_mu;
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t k; (k = next++) < files.size();) {
            RunOptions opt = base;
            opt.scenario = files[k];
            if (files.size() > 1) opt.out_dir = base.out_dir / std::filesystem::path(files[k]).stem();
            std::ostringstream diag;
            const auto res = run_scenario(opt, diag);
            codes[k] = res.exit_code;
            std::lock_guard lock(log_mu);
            std::cerr << diag.str();
            if (res.exit_code != exit_code::config) {
                std::cout << files[k] << ": " << res.cycles_completed << " cycles -> " << opt.out_dir.string() << '\n';
            }
        }
    };

    jobs = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(files.size()));
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return *std::max_element(codes.begin(), codes.end());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AC power-cycling bench simulator"};
    app.require_subcommand(1);

    std::vector<std::string> files;
    RunOptions opt;
    std::string out_dir = "out";
    std::uint64_t seed = 0, cycles = 0;
    std::string mode, emit = "precursors";
    unsigned jobs = 1;
    auto* run = app.add_subcommand("run", "Run one or more scenario files");
    run->add_option("scenario", files, "Scenario file(s)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory (one subdirectory per scenario when several are given)");
    auto* seed_opt = run->add_option("--seed", seed, "Override rng_seed");
    auto* cycles_opt = run->add_option("--cycles", cycles, "Override n_cycles");
    run->add_option("--mode", mode, "Plant model")->check(CLI::IsMember({"averaged", "switched"}));
    run->add_option("--emit", emit, "Outputs to write")->check(CLI::IsMember({"precursors", "waveforms", "both"}));
    run->add_option("--jobs", jobs, "Scenarios run in parallel")->check(CLI::PositiveNumber);

    std::string run_dir, kind, export_out;
    int device = 0;
    auto* exp = app.add_subcommand("export", "Plot-ready CSV from a finished run");
    exp->add_option("run_dir", run_dir, "Run output directory")->required()->check(CLI::ExistingDirectory);
    exp->add_option("--kind", kind, "thermal_cycle, ron_trend, vth_trend or sampling_trace")->required();
    exp->add_option("--device", device, "Device for sampling_trace")->check(CLI::Range(0, 11));
    exp->add_option("-o,--output", export_out, "Write to file instead of standard output");

    std::string check_file;
    auto* val = app.add_subcommand("validate", "Check a scenario file and print it fully resolved");
    val->add_option("scenario", check_file, "Scenario file")->required()->check(CLI::ExistingFile);

    app.add_subcommand("defaults", "Print the default scenario");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : exit_code::config;
    }

    if (*run) {
        opt.out_dir = out_dir;
        if (*seed_opt) opt.seed = seed;
        if (*cycles_opt) opt.cycles = cycles;
        if (mode == "averaged") opt.mode = acpc::PlantMode::Averaged;
        if (mode == "switched") opt.mode = acpc::PlantMode::Switched;
        opt.emit = emit == "both" ? Emit::Both : emit == "waveforms" ? Emit::Waveforms : Emit::Precursors;
        return run_many(files, opt, jobs);
    }
    if (*exp) {
        try {
            const auto csv = export_plotdata(run_dir, kind, device);
            if (export_out.empty()) {
                std::cout << csv;
            } else {
                std::ofstream f(export_out, std::ios::binary);
                f << csv;
            }
            return 0;
        } catch (const acpc::UnknownKind& e) {
            std::cerr << e.what() << '\n';
            return exit_code::config;
        } catch (const std::exception& e) {
            std::cerr << e.what() << '\n';
            return 1;
        }
    }
    if (*val) {
        try {
            const auto vs = acpc::validate(load_scenario(check_file));
            std::cout << serialize_scenario(vs.scenario());
            return 0;
        } catch (const acpc::ConfigError& e) {
            std::cerr << check_file << ": " << e.what() << '\n';
            return exit_code::config;
        }
    }
    std::cout << serialize_scenario(acpc::Scenario{});
    return 0;
}
