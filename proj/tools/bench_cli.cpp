// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 risdma contributors

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "risdma/experiments.hpp"

namespace {

namespace fs = std::filesystem;
using risdma::ExperimentSpec;

// Output directory precedence: --out flag, RISDMA_OUT_DIR, config value.
fs::path resolve_out(const std::string& flag_out, const ExperimentSpec& spec) {
    if (!flag_out.empty()) return flag_out;
    if (const char* env = std::getenv("RISDMA_OUT_DIR"); env != nullptr && *env) {
        return fs::path(env) / fs::path(spec.out).filename();
    }
    return spec.out;
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

int run_spec(const ExperimentSpec& spec, const fs::path& out_base, int jobs) {
    const auto t0 = std::chrono::steady_clock::now();
    const risdma::ExperimentOutput res = risdma::run_experiment(spec, jobs);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    int failures = 0;
    if (spec.experiment == risdma::ExperimentId::DeAccuracy) {
        const fs::path csv = out_base.string() + "_de_accuracy.csv";
        write_file(csv, risdma::de_accuracy_csv(res.de_rows));
        std::cout << "wrote " << csv.string() << " (" << res.de_rows.size()
                  << " rows, " << secs << " s)\n";
        return 0;
    }

    const fs::path csv = out_base.string() + ".csv";
    write_file(csv, risdma::results_csv(res.rows));
    std::cout << "wrote " << csv.string() << " (" << res.rows.size() << " rows, "
              << secs << " s)\n";
    if (!res.traces.empty()) {
        const fs::path tcsv = out_base.string() + "_trace.csv";
        write_file(tcsv, risdma::traces_csv(res.traces));
        std::cout << "wrote " << tcsv.string() << " (" << res.traces.size()
                  << " rows)\n";
    }
    for (const auto& r : res.rows) {
        if (!r.error.empty()) {
            ++failures;
            std::cerr << "run failed: seed " << r.seed << " pmax " << r.pmax_dbm
                      << " dBm variant " << r.variant << ": " << r.error << "\n";
        }
    }
    if (failures > 0) {
        std::cerr << failures << " of " << res.rows.size() << " runs failed\n";
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exposure-aware spectral-efficiency benchmarks for metasurface-"
                 "assisted MIMO uplinks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_flag;
    std::uint64_t seed_flag = 0;
    bool seed_set = false;
    int jobs = 1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_flag, "output path prefix (overrides config)");
        cmd->add_option("--seed", seed_flag, "override the base seed")
            ->each([&](const std::string&) { seed_set = true; });
        cmd->add_option("--jobs", jobs, "worker threads for grid points")
            ->check(CLI::PositiveNumber);
    };

    CLI::App* run = app.add_subcommand("run", "run the experiment in a config file");
    run->add_option("config", config_path, "config file (key = value lines)")
        ->required();
    add_common(run);

    CLI::App* defaults =
        app.add_subcommand("defaults", "print the default configuration");

    CLI::App* de_check =
        app.add_subcommand("de-check", "accuracy table of the asymptotic rate "
                                       "approximation against sampling");
    de_check->add_option("config", config_path, "config file")->required();
    add_common(de_check);

    CLI11_PARSE(app, argc, argv);

    try {
        if (defaults->parsed()) {
            std::cout << risdma::serialize_config(risdma::default_spec());
            return 0;
        }
        ExperimentSpec spec = risdma::load_config(config_path);
        if (seed_set) spec.seed_base = seed_flag;
        if (de_check->parsed()) spec.experiment = risdma::ExperimentId::DeAccuracy;
        const fs::path out_base = resolve_out(out_flag, spec);
        return run_spec(spec, out_base, jobs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
