#include "ebt/experiment.hpp"

#include "ebt/errors.hpp"

#include <fmt/format.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#ifndef EBT_VERSION
#define EBT_VERSION "0.0.0"
#endif

namespace ebt {

using nlohmann::json;

namespace {

const std::map<ExperimentMode, std::string> kModeNames = {
    {ExperimentMode::rate_sweep_w, "rate_sweep_W"},
    {ExperimentMode::rate_sweep_wbar, "rate_sweep_Wbar"},
    {ExperimentMode::optimize_sweep, "optimize_sweep"},
    {ExperimentMode::simulate, "simulate"},
    {ExperimentMode::single, "single"},
};

const std::map<SweepVariable, std::string> kSweepNames = {
    {SweepVariable::explore, "W"},         {SweepVariable::keep, "Wbar"},
    {SweepVariable::max_slots, "s_max"},   {SweepVariable::channels, "N"},
    {SweepVariable::qos_exponent, "d"},    {SweepVariable::preambles, "L"},
    {SweepVariable::arrival_rate, "lambda"}, {SweepVariable::none, "none"},
};

template <typename Enum>
Enum enum_from_name(const std::map<Enum, std::string>& names, const std::string& value,
                    const std::string& field) {
    for (const auto& [e, n] : names)
        if (n == value) return e;
    std::string allowed;
    for (const auto& [e, n] : names) allowed += (allowed.empty() ? "" : ", ") + n;
    throw ConfigError("field '" + field + "': unknown value '" + value + "' (expected one of " +
                      allowed + ")");
}

bool is_integer_variable(SweepVariable v) {
    return v == SweepVariable::explore || v == SweepVariable::keep ||
           v == SweepVariable::max_slots || v == SweepVariable::channels ||
           v == SweepVariable::preambles;
}

// Field readers that report the JSON path on type errors.
class Reader {
public:
    Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError("field '" + path_ + "': expected an object");
    }

    void reject_unknown(std::initializer_list<std::string_view> known) const {
        for (auto it = node_.begin(); it != node_.end(); ++it) {
            bool ok = false;
            for (auto k : known) ok = ok || it.key() == k;
            if (!ok) throw ConfigError("field '" + child(it.key()) + "': unknown field");
        }
    }

    bool has(const char* key) const { return node_.contains(key); }

    const json& at(const char* key) const { return node_.at(key); }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    double number(const char* key, double fallback) const {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_number()) throw ConfigError("field '" + child(key) + "': expected a number");
        return v.get<double>();
    }

    std::int64_t integer(const char* key, std::int64_t fallback) const {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_number_integer()) throw ConfigError("field '" + child(key) + "': expected an integer");
        return v.get<std::int64_t>();
    }

    bool boolean(const char* key, bool fallback) const {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_boolean()) throw ConfigError("field '" + child(key) + "': expected true or false");
        return v.get<bool>();
    }

    std::string string(const char* key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_string()) throw ConfigError("field '" + child(key) + "': expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const char* key) const {
        const json& v = node_.at(key);
        if (!v.is_array()) throw ConfigError("field '" + child(key) + "': expected an array");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number())
                throw ConfigError("field '" + child(key) + "[" + std::to_string(i) +
                                  "]': expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

private:
    const json& node_;
    std::string path_;
};

SlotDistribution make_slots(const ExperimentConfig& c, int max_slots) {
    if (c.slot_pmf) return SlotDistribution(*c.slot_pmf);
    return SlotDistribution::uniform(max_slots);
}

void fill_scenario_columns(ResultRow& row, const SystemParams& p) {
    row.channels = p.channels;
    row.arrival_rate = p.arrival_rate;
    row.preambles = p.preambles;
    row.max_slots = p.slots.max_slots();
    row.qos_exponent = p.qos_exponent;
    row.mean_slots = p.slots.mean();
}

void fill_approximations(ResultRow& row, const EbtPlan& plan, MeanSnr snr) {
    if (plan.keep < plan.explore) {
        row.rate_ebt_approx = mean_rate_ebt_approx(plan, snr);
        row.rate_ebt_lb = mean_rate_ebt_lower_bound(plan, snr);
    }
}

SimMetrics simulate_pooled(const SystemParams& params, const SimPolicy& policy,
                           const SimulationSettings& settings) {
    SimMetrics pooled;
    pooled.rng_seed = settings.seed;
    for (int r = 0; r < settings.replications; ++r) {
        SimOptions options;
        options.horizon_slots = settings.horizon_slots;
        options.seed = settings.seed + static_cast<std::uint64_t>(r);
        pooled.merge(run_simulation(params, policy, options));
    }
    return pooled;
}

std::optional<double> uncensored_qos(const SimMetrics& m) {
    const QosExponent q = empirical_qos_exponent(m);
    if (q.censored) return std::nullopt;
    return q.value;
}

void attach_simulation(ResultRow& row, const SystemParams& params,
                       const std::optional<EbtPlan>& ebt_plan, const std::optional<int>& width,
                       const SimulationSettings& settings) {
    if (ebt_plan && ebt_plan->explore <= params.channels) {
        row.sim_ebt = simulate_pooled(params, SimPolicy::ebt(*ebt_plan), settings);
        row.sim_rate_ebt = row.sim_ebt->mean_rate_per_data_slot();
        row.sim_outage_ebt = row.sim_ebt->outage_fraction();
        row.empirical_qos_ebt = uncensored_qos(*row.sim_ebt);
    }
    if (width && *width <= params.channels) {
        row.sim_conv = simulate_pooled(params, SimPolicy::conventional(*width), settings);
        row.sim_rate_conv = row.sim_conv->mean_rate_per_data_slot();
        row.sim_outage_conv = row.sim_conv->outage_fraction();
        row.empirical_qos_conv = uncensored_qos(*row.sim_conv);
    }
}

ResultRow rate_point(const ExperimentConfig& c, double value) {
    ResultRow row;
    const bool sweep_w = c.mode == ExperimentMode::rate_sweep_w;
    const int explore = sweep_w ? static_cast<int>(value) : c.explore;
    const int keep = sweep_w ? c.keep : static_cast<int>(value);
    row.explore = explore;
    row.keep = keep;
    row.mean_snr_db = c.mean_snr_db;
    if (keep < 1 || keep > explore) return row;

    const MeanSnr snr = MeanSnr::from_db(c.mean_snr_db);
    const EbtPlan plan(explore, keep);
    const double width = equivalent_conventional_width(plan, c.data_slots);
    row.conv_width = width;
    row.rate_ebt_exact = mean_rate_ebt(plan, snr);
    fill_approximations(row, plan, snr);
    row.rate_conv = mean_rate_conventional(ConvPlan(width), snr);
    row.feasible = true;
    return row;
}

ResultRow optimize_point(const ExperimentConfig& c, double value) {
    ResultRow row;
    const SystemParams params = c.scenario_at(value);
    fill_scenario_columns(row, params);
    row.mean_snr_db = c.mean_snr_db;

    const OptimizationOutcome out = optimize(params);
    row.psi_evaluations = out.ebt.psi_evaluations;
    if (out.ebt.plan) {
        row.explore = out.ebt.plan->explore;
        row.keep = out.ebt.plan->keep;
        row.rate_ebt_exact = out.ebt.rate;
        fill_approximations(row, *out.ebt.plan, params.snr);
        row.psi_star_ebt = out.ebt.psi_star;
        row.chernoff_bound = std::exp(out.ebt.psi_star);
    }
    if (out.conventional.width) {
        row.conv_width = *out.conventional.width;
        row.rate_conv = out.conventional.rate;
        row.psi_star_conv = out.conventional.psi_star;
    }
    row.feasible = out.feasible();
    if (c.simulation.enabled && params.arrival_rate > 0.0)
        attach_simulation(row, params, out.ebt.plan, out.conventional.width, c.simulation);
    return row;
}

ResultRow simulate_point(const ExperimentConfig& c, double value) {
    ResultRow row;
    const SystemParams params = c.scenario_at(value);
    fill_scenario_columns(row, params);
    row.mean_snr_db = c.mean_snr_db;
    bool meets_target = true;
    const bool has_traffic = params.arrival_rate > 0.0;

    if (c.ebt_plan) {
        const EbtPlan& plan = *c.ebt_plan;
        row.explore = plan.explore;
        row.keep = plan.keep;
        row.rate_ebt_exact = mean_rate_ebt(plan, params.snr);
        fill_approximations(row, plan, params.snr);
        meets_target = false;
        if (has_traffic) {
            try {
                const PsiResult r = minimize_psi(plan, params.traffic(), params.channels);
                row.psi_star_ebt = r.psi_star;
                row.chernoff_bound = r.bound;
                meets_target = r.psi_star <= -params.qos_exponent;
            } catch (const InfeasibleError&) {
            }
        }
    }
    if (c.conventional_width) {
        const int width = *c.conventional_width;
        row.conv_width = width;
        row.rate_conv = mean_rate_conventional(ConvPlan(width), params.snr);
        bool conv_ok = false;
        if (has_traffic) {
            try {
                const PsiResult r = min_psi_conventional(width, params.traffic(), params.channels);
                row.psi_star_conv = r.psi_star;
                conv_ok = r.psi_star <= -params.qos_exponent;
            } catch (const InfeasibleError&) {
            }
        }
        meets_target = meets_target && conv_ok;
    }
    row.feasible = meets_target;
    attach_simulation(row, params, c.ebt_plan, c.conventional_width, c.simulation);
    return row;
}

ResultRow run_point(const ExperimentConfig& c, double value) {
    ResultRow row;
    try {
        switch (c.mode) {
            case ExperimentMode::rate_sweep_w:
            case ExperimentMode::rate_sweep_wbar:
                row = rate_point(c, value);
                break;
            case ExperimentMode::optimize_sweep:
            case ExperimentMode::single:
                row = optimize_point(c, value);
                break;
            case ExperimentMode::simulate:
                row = simulate_point(c, value);
                break;
        }
    } catch (const DomainError&) {
        row = ResultRow{};
        row.feasible = false;
    } catch (const InfeasibleError&) {
        row = ResultRow{};
        row.feasible = false;
    }
    row.sweep_var = kSweepNames.at(c.sweep_variable);
    row.sweep_value = value;
    return row;
}

std::string csv_field(const std::optional<double>& v) {
    return v ? fmt::format("{:.15g}", *v) : std::string{};
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json sim_json(const SimMetrics& m) {
    const QosExponent q = empirical_qos_exponent(m);
    return {
        {"slots", m.slot_count},
        {"outages", m.outage_count},
        {"outage_fraction", m.outage_fraction()},
        {"outage_standard_error", m.outage_standard_error()},
        {"ue_count", m.ue_count},
        {"dropped_ue_count", m.dropped_ue_count},
        {"mean_admitted_per_slot",
         m.slot_count ? static_cast<double>(m.admitted_sum) / m.slot_count : 0.0},
        {"mean_rate_per_data_slot", optional_json(m.mean_rate_per_data_slot())},
        {"empirical_qos_exponent", q.value},
        {"qos_exponent_censored", q.censored},
        {"seed", m.rng_seed},
    };
}

}  // namespace

std::string library_version() { return EBT_VERSION; }

void ExperimentConfig::validate() const {
    const bool rate_mode = mode == ExperimentMode::rate_sweep_w || mode == ExperimentMode::rate_sweep_wbar;
    if (mode == ExperimentMode::rate_sweep_w && sweep_variable != SweepVariable::explore)
        throw ConfigError("field 'sweep.variable': rate_sweep_W sweeps W");
    if (mode == ExperimentMode::rate_sweep_wbar && sweep_variable != SweepVariable::keep)
        throw ConfigError("field 'sweep.variable': rate_sweep_Wbar sweeps Wbar");
    if (!rate_mode && (sweep_variable == SweepVariable::explore || sweep_variable == SweepVariable::keep))
        throw ConfigError("field 'sweep.variable': W/Wbar sweeps need a rate_sweep mode");
    if (mode == ExperimentMode::single) {
        if (sweep_variable != SweepVariable::none)
            throw ConfigError("field 'sweep.variable': single mode takes no sweep variable");
    } else {
        if (sweep_variable == SweepVariable::none)
            throw ConfigError("field 'sweep.variable': sweep modes need exactly one sweep variable");
        if (sweep_values.empty()) throw ConfigError("field 'sweep.values': sweep sequence is empty");
    }
    for (std::size_t i = 0; i < sweep_values.size(); ++i) {
        const double v = sweep_values[i];
        const std::string where = "field 'sweep.values[" + std::to_string(i) + "]': ";
        if (!std::isfinite(v)) throw ConfigError(where + "not finite");
        if (is_integer_variable(sweep_variable) && (v != std::floor(v) || v < 1.0))
            throw ConfigError(where + "expected a positive integer");
        if (sweep_variable == SweepVariable::qos_exponent && !(v > 0.0))
            throw ConfigError(where + "d must be positive");
        if (sweep_variable == SweepVariable::arrival_rate && !(v >= 0.0))
            throw ConfigError(where + "lambda must be >= 0");
    }
    if (slot_pmf && sweep_variable == SweepVariable::max_slots)
        throw ConfigError("field 'scenario.slot_pmf': cannot sweep s_max with an explicit pmf");
    if (slot_pmf && static_cast<int>(slot_pmf->size()) != max_slots)
        throw ConfigError("field 'scenario.slot_pmf': length must equal s_max");
    try {
        const SystemParams base{channels, arrival_rate, preambles, make_slots(*this, max_slots),
                                MeanSnr::from_db(mean_snr_db), qos_exponent};
        base.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("field 'scenario': ") + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("field 'scenario': ") + e.what());
    }
    if (rate_mode) {
        if (explore < 1 || keep < 1) throw ConfigError("field 'rate_sweep': W and Wbar must be >= 1");
        if (data_slots < 1) throw ConfigError("field 'rate_sweep.s': must be >= 1");
    }
    if (mode == ExperimentMode::simulate && !ebt_plan && !conventional_width)
        throw ConfigError("field 'plans': simulate mode needs an ebt and/or conventional plan");
    if (conventional_width && *conventional_width < 1)
        throw ConfigError("field 'plans.conventional': must be >= 1");
    if (simulation.horizon_slots <= max_slots)
        throw ConfigError("field 'simulation.slots': horizon must exceed s_max");
    if (simulation.replications < 1) throw ConfigError("field 'simulation.replications': must be >= 1");
    if (workers < 1) throw ConfigError("field 'workers': must be >= 1");
}

SystemParams ExperimentConfig::scenario_at(double value) const {
    int n = channels;
    double lambda = arrival_rate;
    int l = preambles;
    int s_max = max_slots;
    double d = qos_exponent;
    switch (sweep_variable) {
        case SweepVariable::max_slots: s_max = static_cast<int>(value); break;
        case SweepVariable::channels: n = static_cast<int>(value); break;
        case SweepVariable::qos_exponent: d = value; break;
        case SweepVariable::preambles: l = static_cast<int>(value); break;
        case SweepVariable::arrival_rate: lambda = value; break;
        default: break;
    }
    return SystemParams{n, lambda, l, make_slots(*this, s_max), MeanSnr::from_db(mean_snr_db), d};
}

json config_to_json(const ExperimentConfig& c) {
    json scenario = {
        {"N", c.channels},       {"lambda", c.arrival_rate},       {"L", c.preambles},
        {"s_max", c.max_slots},  {"mean_snr_db", c.mean_snr_db},   {"d", c.qos_exponent},
    };
    if (c.slot_pmf) scenario["slot_pmf"] = *c.slot_pmf;
    json doc = {
        {"name", c.name},
        {"mode", kModeNames.at(c.mode)},
        {"sweep", {{"variable", kSweepNames.at(c.sweep_variable)}, {"values", c.sweep_values}}},
        {"scenario", scenario},
        {"rate_sweep", {{"W", c.explore}, {"Wbar", c.keep}, {"s", c.data_slots}}},
        {"simulation",
         {{"enabled", c.simulation.enabled},
          {"slots", c.simulation.horizon_slots},
          {"seed", c.simulation.seed},
          {"replications", c.simulation.replications}}},
        {"output_dir", c.output_dir},
        {"workers", c.workers},
    };
    json plans = json::object();
    if (c.ebt_plan) plans["ebt"] = {c.ebt_plan->explore, c.ebt_plan->keep};
    if (c.conventional_width) plans["conventional"] = *c.conventional_width;
    doc["plans"] = plans;
    return doc;
}

ExperimentConfig config_from_json(const json& doc) {
    ExperimentConfig c;
    const Reader root(doc, "");
    root.reject_unknown({"name", "mode", "sweep", "scenario", "rate_sweep", "plans", "simulation",
                         "output_dir", "workers"});
    c.name = root.string("name", c.name);
    if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos)
        throw ConfigError("field 'name': must be a nonempty file-name-safe string");
    if (!root.has("mode")) throw ConfigError("field 'mode': required");
    c.mode = enum_from_name(kModeNames, root.string("mode", ""), "mode");

    if (root.has("sweep")) {
        const Reader sweep(root.at("sweep"), "sweep");
        sweep.reject_unknown({"variable", "values"});
        c.sweep_variable = enum_from_name(kSweepNames, sweep.string("variable", "none"), "sweep.variable");
        if (sweep.has("values")) c.sweep_values = sweep.numbers("values");
    }
    if (root.has("scenario")) {
        const Reader s(root.at("scenario"), "scenario");
        s.reject_unknown({"N", "lambda", "L", "s_max", "slot_pmf", "mean_snr_db", "d"});
        c.channels = static_cast<int>(s.integer("N", c.channels));
        c.arrival_rate = s.number("lambda", c.arrival_rate);
        c.preambles = static_cast<int>(s.integer("L", c.preambles));
        c.max_slots = static_cast<int>(s.integer("s_max", c.max_slots));
        if (s.has("slot_pmf")) {
            c.slot_pmf = s.numbers("slot_pmf");
            if (!s.has("s_max")) c.max_slots = static_cast<int>(c.slot_pmf->size());
        }
        c.mean_snr_db = s.number("mean_snr_db", c.mean_snr_db);
        c.qos_exponent = s.number("d", c.qos_exponent);
    }
    if (root.has("rate_sweep")) {
        const Reader r(root.at("rate_sweep"), "rate_sweep");
        r.reject_unknown({"W", "Wbar", "s"});
        c.explore = static_cast<int>(r.integer("W", c.explore));
        c.keep = static_cast<int>(r.integer("Wbar", c.keep));
        c.data_slots = static_cast<int>(r.integer("s", c.data_slots));
    }
    if (root.has("plans")) {
        const Reader p(root.at("plans"), "plans");
        p.reject_unknown({"ebt", "conventional"});
        if (p.has("ebt")) {
            const json& e = p.at("ebt");
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
                throw ConfigError("field 'plans.ebt': expected [W, Wbar] integers");
            try {
                c.ebt_plan = EbtPlan(e[0].get<int>(), e[1].get<int>());
            } catch (const DomainError& err) {
                throw ConfigError(std::string("field 'plans.ebt': ") + err.what());
            }
        }
        if (p.has("conventional")) c.conventional_width = static_cast<int>(p.integer("conventional", 1));
    }
    if (root.has("simulation")) {
        const Reader s(root.at("simulation"), "simulation");
        s.reject_unknown({"enabled", "slots", "seed", "replications"});
        c.simulation.enabled = s.boolean("enabled", c.simulation.enabled);
        c.simulation.horizon_slots = s.integer("slots", c.simulation.horizon_slots);
        if (s.has("seed")) {
            const json& v = s.at("seed");
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
                throw ConfigError("field 'simulation.seed': expected a nonnegative integer");
            c.simulation.seed = v.get<std::uint64_t>();
        }
        c.simulation.replications = static_cast<int>(s.integer("replications", c.simulation.replications));
    }
    c.output_dir = root.string("output_dir", c.output_dir);
    c.workers = static_cast<int>(root.integer("workers", c.workers));
    c.validate();
    return c;
}

ExperimentConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return config_from_json(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::vector<std::string> preset_names() {
    return {"fig3", "fig4", "fig6", "fig7", "fig8", "fig9", "table1", "table2", "table3", "table4"};
}

ExperimentConfig preset(std::string_view name) {
    ExperimentConfig c;
    c.name = std::string(name);
    const double d_005 = -std::log(0.05);
    auto range = [](int first, int last, int step) {
        std::vector<double> v;
        for (int x = first; x <= last; x += step) v.push_back(x);
        return v;
    };

    if (name == "fig3" || name == "fig4") {
        c.mean_snr_db = 10.0;
        c.data_slots = 10;
        if (name == "fig3") {
            c.mode = ExperimentMode::rate_sweep_w;
            c.sweep_variable = SweepVariable::explore;
            c.keep = 5;
            c.sweep_values = range(5, 50, 1);
        } else {
            c.mode = ExperimentMode::rate_sweep_wbar;
            c.sweep_variable = SweepVariable::keep;
            c.explore = 20;
            c.sweep_values = range(1, 20, 1);
        }
        return c;
    }

    c.mode = ExperimentMode::optimize_sweep;
    c.arrival_rate = 8.0;
    c.preambles = 32;
    c.mean_snr_db = 6.0;
    c.qos_exponent = d_005;
    c.simulation.enabled = name.starts_with("fig");
    if (name == "table1" || name == "fig6") {
        c.channels = 200;
        c.sweep_variable = SweepVariable::max_slots;
        c.sweep_values = range(2, 20, 2);
    } else if (name == "table2" || name == "fig7") {
        c.max_slots = 10;
        c.sweep_variable = SweepVariable::channels;
        c.sweep_values = range(60, 300, 30);
    } else if (name == "table3" || name == "fig8") {
        c.channels = 300;
        c.max_slots = 10;
        c.sweep_variable = SweepVariable::qos_exponent;
        // -ln(10^-k) for k = 1.0, 1.2, ..., 3.0; the printed table truncates these to 2.3 ... 6.9.
        for (int j = 0; j <= 10; ++j) c.sweep_values.push_back(std::log(10.0) * (1.0 + 0.2 * j));
    } else if (name == "table4" || name == "fig9") {
        c.channels = 300;
        c.max_slots = 10;
        c.arrival_rate = 20.0;
        c.sweep_variable = SweepVariable::preambles;
        c.sweep_values = range(10, 30, 2);
    } else {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
    }
    return c;
}

const std::vector<std::string> kCsvColumns = {
    "sweep_var",      "sweep_value",     "N",              "lambda",       "L",
    "s_max",          "d",               "mean_snr_db",    "W",            "Wbar",
    "Wc",             "rate_ebt_exact",  "rate_ebt_approx", "rate_ebt_lb", "rate_conv",
    "psi_star_ebt",   "psi_star_conv",   "chernoff_bound", "sim_rate_ebt", "sim_rate_conv",
    "sim_outage_ebt", "sim_outage_conv", "empirical_qos_ebt", "empirical_qos_conv", "feasible",
};

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const std::vector<double> values =
        config.mode == ExperimentMode::single ? std::vector<double>{0.0} : config.sweep_values;

    ExperimentResult result{config, std::vector<ResultRow>(values.size()), 0.0};
    std::vector<std::exception_ptr> failures(values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            try {
                result.rows[i] = run_point(config, values[i]);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const int threads = std::min<int>(config.workers, static_cast<int>(values.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);

    result.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
    std::string out;
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i) out += (i ? "," : "") + kCsvColumns[i];
    out += "\r\n";
    for (const ResultRow& r : rows) {
        const std::vector<std::string> fields = {
            csv_quote(r.sweep_var),           fmt::format("{:.15g}", r.sweep_value),
            csv_field(r.channels),            csv_field(r.arrival_rate),
            csv_field(r.preambles),           csv_field(r.max_slots),
            csv_field(r.qos_exponent),        csv_field(r.mean_snr_db),
            csv_field(r.explore),             csv_field(r.keep),
            csv_field(r.conv_width),          csv_field(r.rate_ebt_exact),
            csv_field(r.rate_ebt_approx),     csv_field(r.rate_ebt_lb),
            csv_field(r.rate_conv),           csv_field(r.psi_star_ebt),
            csv_field(r.psi_star_conv),       csv_field(r.chernoff_bound),
            csv_field(r.sim_rate_ebt),        csv_field(r.sim_rate_conv),
            csv_field(r.sim_outage_ebt),      csv_field(r.sim_outage_conv),
            csv_field(r.empirical_qos_ebt),   csv_field(r.empirical_qos_conv),
            r.feasible ? "true" : "false",
        };
        for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + fields[i];
        out += "\r\n";
    }
    return out;
}

json summary_json(const ExperimentResult& result) {
    json rows = json::array();
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const ResultRow& r = result.rows[i];
        json row = {
            {"index", i},
            {"sweep_var", r.sweep_var},
            {"sweep_value", r.sweep_value},
            {"feasible", r.feasible},
            {"W", optional_json(r.explore)},
            {"Wbar", optional_json(r.keep)},
            {"Wc", optional_json(r.conv_width)},
        };
        if (r.mean_slots) {
            row["s_bar"] = *r.mean_slots;
            // Channel-slots per UE including the pilot: W + sbar Wbar vs (sbar + 1) Wc.
            if (r.explore && r.keep) row["packets_ebt"] = *r.explore + *r.mean_slots * *r.keep;
            if (r.conv_width) row["packets_conv"] = (*r.mean_slots + 1.0) * *r.conv_width;
        }
        if (r.psi_star_ebt) row["achieved_qos_exponent_ebt"] = -*r.psi_star_ebt;
        if (r.psi_star_conv) row["achieved_qos_exponent_conv"] = -*r.psi_star_conv;
        if (r.psi_evaluations) row["psi_evaluations"] = r.psi_evaluations;
        if (r.sim_ebt) row["sim_ebt"] = sim_json(*r.sim_ebt);
        if (r.sim_conv) row["sim_conv"] = sim_json(*r.sim_conv);
        rows.push_back(std::move(row));
    }
    return {
        {"library", "ebt"},
        {"version", library_version()},
        {"config", config_to_json(result.config)},
        {"wall_clock_seconds", result.wall_clock_seconds},
        {"columns", kCsvColumns},
        {"rows", rows},
    };
}

OutputPaths write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    OutputPaths paths{dir / (result.config.name + ".csv"), dir / (result.config.name + ".summary.json")};
    {
        std::ofstream csv(paths.csv, std::ios::binary);
        csv << rows_to_csv(result.rows);
        if (!csv) throw std::runtime_error("failed to write " + paths.csv.string());
    }
    {
        std::ofstream summary(paths.summary, std::ios::binary);
        summary << summary_json(result).dump(2) << "\n";
        if (!summary) throw std::runtime_error("failed to write " + paths.summary.string());
    }
    return paths;
}

}  // namespace ebt
