#pragma once

// Sweep definitions, presets for the published figures/tables, and result emission.

#include "ebt/optimizer.hpp"
#include "ebt/simulator.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ebt {

std::string library_version();

enum class ExperimentMode { rate_sweep_w, rate_sweep_wbar, optimize_sweep, simulate, single };

enum class SweepVariable { explore, keep, max_slots, channels, qos_exponent, preambles, arrival_rate, none };

struct SimulationSettings {
    bool enabled = false;
    std::int64_t horizon_slots = 1'000'000;
    std::uint64_t seed = 1;
    int replications = 1;
};

struct ExperimentConfig {
    std::string name = "experiment";
    ExperimentMode mode = ExperimentMode::single;
    SweepVariable sweep_variable = SweepVariable::none;
    std::vector<double> sweep_values;

    // Scenario. The slot pmf is uniform over 1..max_slots unless slot_pmf is given.
    int channels = 300;
    double arrival_rate = 8.0;
    int preambles = 32;
    int max_slots = 10;
    std::optional<std::vector<double>> slot_pmf;
    double mean_snr_db = 6.0;
    double qos_exponent = 2.995732273553991;  // -ln 0.05

    // Fixed axes of the rate sweeps.
    int explore = 20;
    int keep = 5;
    int data_slots = 10;

    // Plans evaluated in simulate mode.
    std::optional<EbtPlan> ebt_plan;
    std::optional<int> conventional_width;

    SimulationSettings simulation;
    std::string output_dir = ".";
    int workers = 1;

    /// Throws ConfigError naming the offending field.
    void validate() const;
    /// Scenario with the sweep variable set to `value` (or the base scenario for `none`).
    SystemParams scenario_at(double value) const;
};

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& doc);
/// Parses and validates; ConfigError messages carry line/column or the field path.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<std::string> preset_names();
ExperimentConfig preset(std::string_view name);

struct ResultRow {
    std::string sweep_var;
    double sweep_value = 0.0;
    std::optional<double> channels, arrival_rate, preambles, max_slots, qos_exponent, mean_snr_db;
    std::optional<double> explore, keep, conv_width;
    std::optional<double> rate_ebt_exact, rate_ebt_approx, rate_ebt_lb, rate_conv;
    std::optional<double> psi_star_ebt, psi_star_conv, chernoff_bound;
    std::optional<double> sim_rate_ebt, sim_rate_conv, sim_outage_ebt, sim_outage_conv;
    std::optional<double> empirical_qos_ebt, empirical_qos_conv;
    bool feasible = false;

    // Summary-only fields.
    std::optional<double> mean_slots;
    int psi_evaluations = 0;
    std::optional<SimMetrics> sim_ebt, sim_conv;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<ResultRow> rows;
    double wall_clock_seconds = 0.0;
};

/// Runs every sweep point (concurrently up to config.workers); rows keep sweep order.
ExperimentResult run_experiment(const ExperimentConfig& config);

extern const std::vector<std::string> kCsvColumns;

std::string rows_to_csv(const std::vector<ResultRow>& rows);
nlohmann::json summary_json(const ExperimentResult& result);

struct OutputPaths {
    std::filesystem::path csv;
    std::filesystem::path summary;
};

OutputPaths write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

}  // namespace ebt
