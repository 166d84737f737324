// ebt: run analytical sweeps, optimizations and simulations from a config or a preset.
//
//   ebt run <config.json> [--seed S] [--out DIR] [--workers N] [--slots N]
//   ebt preset <name> [--emit-config] [--seed S] [--out DIR] [--workers N] [--slots N]
//
// Exit codes: 0 success, 2 config error, 3 numerical/internal failure.

#include "ebt/errors.hpp"
#include "ebt/experiment.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInternal = 3;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> workers;
    std::optional<std::int64_t> slots;
};

void apply(const Overrides& o, ebt::ExperimentConfig& c) {
    if (o.seed) c.simulation.seed = *o.seed;
    if (o.out) c.output_dir = *o.out;
    if (o.workers) c.workers = *o.workers;
    if (o.slots) c.simulation.horizon_slots = *o.slots;
    c.validate();
}

std::string cell(const std::optional<double>& v) {
    return v ? std::to_string(static_cast<long long>(*v)) : std::string("-");
}

int execute(const ebt::ExperimentConfig& config) {
    const ebt::ExperimentResult result = ebt::run_experiment(config);
    const ebt::OutputPaths paths = ebt::write_outputs(result, config.output_dir);
    std::cout << config.name << ": " << result.rows.size() << " rows in "
              << result.wall_clock_seconds << " s\n";
    for (const auto& r : result.rows) {
        std::cout << "  " << r.sweep_var << "=" << r.sweep_value << "  W=" << cell(r.explore)
                  << " Wbar=" << cell(r.keep) << " Wc=";
        if (r.conv_width)
            std::cout << *r.conv_width;
        else
            std::cout << "-";
        std::cout << (r.feasible ? "" : "  (infeasible)") << "\n";
    }
    std::cout << "wrote " << paths.csv.string() << "\n      " << paths.summary.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Explore-before-talk channel allocation: rates, outage bounds, optimizer, simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ebt::library_version());

    Overrides overrides;
    auto add_overrides = [&](CLI::App* cmd) {
        cmd->add_option("--seed", overrides.seed, "Simulation RNG seed (u64)");
        cmd->add_option("--out", overrides.out, "Output directory");
        cmd->add_option("--workers", overrides.workers, "Concurrent sweep points")->check(CLI::PositiveNumber);
        cmd->add_option("--slots", overrides.slots, "Simulation horizon in slots")->check(CLI::PositiveNumber);
    };

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run an experiment config file");
    run->add_option("config", config_path, "Experiment config (JSON)")->required();
    add_overrides(run);

    std::string preset_name;
    bool emit_config = false;
    auto* preset = app.add_subcommand("preset", "Run (or print) a built-in figure/table preset");
    preset->add_option("name", preset_name, "One of: fig3 fig4 fig6 fig7 fig8 fig9 table1..table4")
        ->required();
    preset->add_flag("--emit-config", emit_config, "Print the preset config as JSON and exit");
    add_overrides(preset);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        ebt::ExperimentConfig config =
            run->parsed() ? ebt::load_config(config_path) : ebt::preset(preset_name);
        apply(overrides, config);
        if (preset->parsed() && emit_config) {
            std::cout << ebt::config_to_json(config).dump(2) << "\n";
            return 0;
        }
        return execute(config);
    } catch (const ebt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ebt::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << " (achieved error " << e.achieved_error()
                  << ")\n";
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
