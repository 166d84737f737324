#include "ebt/errors.hpp"
#include "ebt/experiment.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace ebt;
namespace fs = std::filesystem;

namespace {

const double kD05 = -std::log(0.05);

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("ebt_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(EBT_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string config_error(std::string_view text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("config validation") {
    CHECK(config_error(R"({"mode": "optimize_sweep", "sweep": {"variable": "N", "values": []}})")
              .find("sweep.values") != std::string::npos);
    CHECK(config_error(R"({"mode": "optimize_sweep", "sweep": {"variable": "none", "values": [1]}})")
              .find("sweep.variable") != std::string::npos);
    CHECK(config_error(R"({"mode": "single", "scenario": {"N": 300, "lamda": 8}})")
              .find("scenario.lamda") != std::string::npos);
    CHECK(config_error(R"({"mode": "single", "scenario": {"N": "300"}})").find("scenario.N") !=
          std::string::npos);
    CHECK(config_error(R"({"mode": "sweep_everything"})").find("mode") != std::string::npos);
    CHECK(config_error(R"({"scenario": {}})").find("mode") != std::string::npos);
    CHECK(config_error(R"({"mode": "simulate", "sweep": {"variable": "N", "values": [300]}})").find("plans") != std::string::npos);
    CHECK(config_error(R"({"mode": "single", "scenario": {"d": -1}})").find("scenario") !=
          std::string::npos);
    CHECK(config_error(R"({"mode": "optimize_sweep", "sweep": {"variable": "N", "values": [60, 9.5]}})")
              .find("sweep.values") != std::string::npos);

    const std::string syntax = config_error("{\n  \"mode\": \"single\",\n  \"workers\": ,\n}");
    CHECK(syntax.find("line 3") != std::string::npos);

    CHECK(config_error(R"({"mode": "single"})").empty());
    CHECK_THROWS_AS(preset("table9"), ConfigError);
}

TEST_CASE("preset parameterizations") {
    const ExperimentConfig t1 = preset("table1");
    CHECK(t1.mode == ExperimentMode::optimize_sweep);
    CHECK(t1.channels == 200);
    CHECK(t1.arrival_rate == 8.0);
    CHECK(t1.preambles == 32);
    CHECK(t1.qos_exponent == kD05);
    CHECK(t1.mean_snr_db == 6.0);
    CHECK(t1.sweep_variable == SweepVariable::max_slots);
    CHECK(t1.sweep_values == std::vector<double>{2, 4, 6, 8, 10, 12, 14, 16, 18, 20});
    CHECK_FALSE(t1.simulation.enabled);

    const ExperimentConfig t2 = preset("table2");
    CHECK(t2.max_slots == 10);
    CHECK(t2.sweep_variable == SweepVariable::channels);
    CHECK(t2.sweep_values == std::vector<double>{60, 90, 120, 150, 180, 210, 240, 270, 300});

    const ExperimentConfig f8 = preset("fig8");
    CHECK(f8.channels == 300);
    CHECK(f8.sweep_variable == SweepVariable::qos_exponent);
    REQUIRE(f8.sweep_values.size() == 11);
    CHECK(f8.sweep_values.front() == doctest::Approx(std::log(10.0)));
    CHECK(f8.sweep_values.back() == doctest::Approx(3.0 * std::log(10.0)));
    CHECK(f8.simulation.enabled);

    const ExperimentConfig f9 = preset("fig9");
    CHECK(f9.channels == 300);
    CHECK(f9.max_slots == 10);
    CHECK(f9.arrival_rate == 20.0);
    CHECK(f9.qos_exponent == kD05);
    CHECK(f9.sweep_variable == SweepVariable::preambles);
    CHECK(f9.sweep_values.front() == 10);
    CHECK(f9.sweep_values.back() == 30);

    const ExperimentConfig f3 = preset("fig3");
    CHECK(f3.mode == ExperimentMode::rate_sweep_w);
    CHECK(f3.mean_snr_db == 10.0);
    CHECK(f3.keep == 5);
    CHECK(f3.data_slots == 10);

    const ExperimentConfig f4 = preset("fig4");
    CHECK(f4.mode == ExperimentMode::rate_sweep_wbar);
    CHECK(f4.explore == 20);
    CHECK(f4.sweep_values.front() == 1);
    CHECK(f4.sweep_values.back() == 20);

    for (const std::string& name : preset_names()) {
        CAPTURE(name);
        const ExperimentConfig c = preset(name);
        CHECK_NOTHROW(c.validate());
        // JSON round trip preserves every field.
        CHECK(config_to_json(config_from_json(config_to_json(c))) == config_to_json(c));
    }
}

TEST_CASE("table2 preset rows") {
    const ExperimentResult r = run_experiment(preset("table2"));
    const int W[] = {1, 3, 2, 5, 7, 6, 9, 8, 10};
    const int Wbar[] = {1, 1, 2, 2, 2, 3, 3, 4, 4};
    const int Wc[] = {1, 1, 2, 2, 3, 3, 4, 4, 5};
    REQUIRE(r.rows.size() == 9);
    for (int i = 0; i < 9; ++i) {
        CHECK(r.rows[i].feasible);
        CHECK(*r.rows[i].explore == W[i]);
        CHECK(*r.rows[i].keep == Wbar[i]);
        CHECK(*r.rows[i].conv_width == Wc[i]);
        CHECK(*r.rows[i].chernoff_bound <= 0.05);
        CHECK_FALSE(r.rows[i].sim_outage_ebt.has_value());
    }
    const nlohmann::json s = summary_json(r);
    const auto& last = s["rows"].back();
    CHECK(last["s_bar"].get<double>() == 5.5);
    CHECK(last["packets_conv"].get<double>() == 32.5);
    CHECK(last["packets_ebt"].get<double>() == 32.0);
}

TEST_CASE("fig3 rate column increases with W") {
    const ExperimentResult r = run_experiment(preset("fig3"));
    for (std::size_t i = 1; i < r.rows.size(); ++i)
        CHECK(*r.rows[i].rate_ebt_exact > *r.rows[i - 1].rate_ebt_exact);
}

TEST_CASE("csv layout") {
    const std::string header =
        "sweep_var,sweep_value,N,lambda,L,s_max,d,mean_snr_db,W,Wbar,Wc,rate_ebt_exact,"
        "rate_ebt_approx,rate_ebt_lb,rate_conv,psi_star_ebt,psi_star_conv,chernoff_bound,"
        "sim_rate_ebt,sim_rate_conv,sim_outage_ebt,sim_outage_conv,empirical_qos_ebt,"
        "empirical_qos_conv,feasible";
    ExperimentConfig c = preset("table2");
    c.sweep_values = {20, 300};
    const ExperimentResult r = run_experiment(c);
    const std::string csv = rows_to_csv(r.rows);
    CHECK(csv.substr(0, header.size()) == header);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    std::getline(lines, line);
    // Infeasible point: no plan, no fabricated numbers.
    CHECK_FALSE(r.rows[0].feasible);
    CHECK(line.find(",,,,") != std::string::npos);
    CHECK(line.find("false") != std::string::npos);
}

TEST_CASE("summary config echo re-runs to identical csv") {
    ExperimentConfig c = preset("fig7");
    c.simulation.horizon_slots = 20'000;
    c.sweep_values = {90, 300};
    c.workers = 2;
    const ExperimentResult first = run_experiment(c);
    const nlohmann::json summary = summary_json(first);
    CHECK(summary.contains("version"));
    CHECK(summary.contains("wall_clock_seconds"));
    const ExperimentConfig echoed = config_from_json(summary["config"]);
    const ExperimentResult second = run_experiment(echoed);
    CHECK(rows_to_csv(first.rows) == rows_to_csv(second.rows));

    ExperimentConfig serial = echoed;
    serial.workers = 1;
    CHECK(rows_to_csv(run_experiment(serial).rows) == rows_to_csv(first.rows));
}

TEST_CASE("cli exit codes and outputs") {
    const fs::path dir = scratch("cli");
    const fs::path log = dir / "log.txt";

    CHECK(run_cli("preset table2 --out " + dir.string(), log) == 0);
    CHECK(fs::exists(dir / "table2.csv"));
    const nlohmann::json summary = nlohmann::json::parse(slurp(dir / "table2.summary.json"));
    CHECK(summary["rows"].back()["packets_conv"].get<double>() == 32.5);

    CHECK(run_cli("preset table2 --emit-config", dir / "emit.json") == 0);
    CHECK(config_from_json(nlohmann::json::parse(slurp(dir / "emit.json"))).sweep_values ==
          preset("table2").sweep_values);

    CHECK(run_cli("preset nosuch", log) == 2);
    CHECK(run_cli("run " + (dir / "missing.json").string(), log) == 2);
    CHECK(run_cli("frobnicate", log) == 2);

    std::ofstream(dir / "bad.json") << "{\"mode\": \"optimize_sweep\", \"sweep\": {\"variable\": \"N\", \"values\": []}}";
    CHECK(run_cli("run " + (dir / "bad.json").string(), log) == 2);
    CHECK(slurp(log).find("sweep.values") != std::string::npos);

    // Infeasible sweep points leave the exit code alone.
    std::ofstream(dir / "mixed.json")
        << R"({"name": "mixed", "mode": "optimize_sweep", "sweep": {"variable": "N", "values": [20, 300]}})";
    CHECK(run_cli("run " + (dir / "mixed.json").string() + " --out " + dir.string(), log) == 0);

    // An output path that cannot be created is an internal failure.
    std::ofstream(dir / "blocker") << "x";
    CHECK(run_cli("preset table2 --out " + (dir / "blocker" / "sub").string(), log) == 3);
}
