#include "ebt/errors.hpp"
#include "ebt/experiment.hpp"
#include "ebt/optimizer.hpp"
#include "ebt/simulator.hpp"
#include "ebt/specfun.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace ebt;

namespace {

SystemParams make_params(int channels, double arrival_rate, int preambles, double qos_exponent,
                         std::optional<int> max_slots, std::optional<std::vector<double>> slot_pmf,
                         double mean_snr_db) {
    if (max_slots.has_value() == slot_pmf.has_value())
        throw ConfigError("give exactly one of s_max (uniform) or slot_pmf");
    SlotDistribution slots =
        slot_pmf ? SlotDistribution(*slot_pmf) : SlotDistribution::uniform(*max_slots);
    SystemParams p{channels, arrival_rate, preambles, std::move(slots), MeanSnr::from_db(mean_snr_db),
                   qos_exponent};
    p.validate();
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Explore-before-talk uplink allocation (C++ core)";
    m.attr("__version__") = library_version();

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<IndexError>(m, "IndexError", PyExc_IndexError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_ValueError);
    py::register_exception<OverflowGuardError>(m, "OverflowGuardError", PyExc_OverflowError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<EbtPlan>(m, "EbtPlan")
        .def(py::init<int, int>(), py::arg("W"), py::arg("Wbar"))
        .def_readonly("W", &EbtPlan::explore)
        .def_readonly("Wbar", &EbtPlan::keep)
        .def("__eq__", [](const EbtPlan& a, const EbtPlan& b) { return a == b; })
        .def("__repr__", [](const EbtPlan& p) {
            return "EbtPlan(W=" + std::to_string(p.explore) + ", Wbar=" + std::to_string(p.keep) + ")";
        });

    py::class_<TrafficRates>(m, "TrafficRates")
        .def(py::init<double, double>(), py::arg("lambda0"), py::arg("lambda1"))
        .def_readonly("lambda0", &TrafficRates::admitted)
        .def_readonly("lambda1", &TrafficRates::residual)
        .def_property_readonly("lambda_c", &TrafficRates::total);

    py::class_<PsiResult>(m, "PsiResult")
        .def_readonly("theta_star", &PsiResult::theta_star)
        .def_readonly("psi_star", &PsiResult::psi_star)
        .def_readonly("bound", &PsiResult::bound);

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init(&make_params), py::arg("N"), py::arg("lam"), py::arg("L"), py::arg("d"),
             py::arg("s_max") = py::none(), py::arg("slot_pmf") = py::none(),
             py::arg("mean_snr_db") = 6.0)
        .def_readonly("N", &SystemParams::channels)
        .def_readonly("lam", &SystemParams::arrival_rate)
        .def_readonly("L", &SystemParams::preambles)
        .def_readonly("d", &SystemParams::qos_exponent)
        .def_property_readonly("s_max", [](const SystemParams& p) { return p.slots.max_slots(); })
        .def_property_readonly("s_bar", [](const SystemParams& p) { return p.slots.mean(); })
        .def_property_readonly("mean_snr", [](const SystemParams& p) { return p.snr.linear(); })
        .def("traffic", &SystemParams::traffic);

    py::class_<EbtSolution>(m, "EbtSolution")
        .def_readonly("plan", &EbtSolution::plan)
        .def_readonly("rate", &EbtSolution::rate)
        .def_readonly("psi_star", &EbtSolution::psi_star)
        .def_readonly("psi_evaluations", &EbtSolution::psi_evaluations)
        .def_property_readonly("feasible", &EbtSolution::feasible);

    py::class_<ConvSolution>(m, "ConvSolution")
        .def_readonly("Wc", &ConvSolution::width)
        .def_readonly("rate", &ConvSolution::rate)
        .def_readonly("psi_star", &ConvSolution::psi_star)
        .def_property_readonly("feasible", &ConvSolution::feasible);

    py::class_<SimMetrics>(m, "SimMetrics")
        .def_readonly("slot_count", &SimMetrics::slot_count)
        .def_readonly("outage_count", &SimMetrics::outage_count)
        .def_readonly("ue_count", &SimMetrics::ue_count)
        .def_readonly("rng_seed", &SimMetrics::rng_seed)
        .def_property_readonly("outage_fraction", &SimMetrics::outage_fraction)
        .def_property_readonly("mean_rate_per_data_slot", &SimMetrics::mean_rate_per_data_slot)
        .def_property_readonly("empirical_qos_exponent", [](const SimMetrics& s) {
            const QosExponent q = empirical_qos_exponent(s);
            return py::make_tuple(q.value, q.censored);
        });

    // Special functions. Rates take the mean SNR on the linear scale.
    m.def("exp_integral_e1", &exp_integral_e1, py::arg("x"));
    m.def("order_stat_pdf", &order_stat_pdf, py::arg("w"), py::arg("W"), py::arg("x"));
    m.def("order_stat_mean", &order_stat_mean, py::arg("w"), py::arg("W"), py::arg("mean") = 1.0);

    m.def("mean_rate_ebt_exact",
          [](const EbtPlan& p, double snr) { return mean_rate_ebt_exact(p, MeanSnr(snr)); },
          py::arg("plan"), py::arg("mean_snr"));
    m.def("mean_rate_ebt_quadrature",
          [](const EbtPlan& p, double snr) { return mean_rate_ebt_quadrature(p, MeanSnr(snr)); },
          py::arg("plan"), py::arg("mean_snr"));
    m.def("mean_rate_ebt",
          [](const EbtPlan& p, double snr) { return mean_rate_ebt(p, MeanSnr(snr)); },
          py::arg("plan"), py::arg("mean_snr"));
    m.def("mean_rate_ebt_approx",
          [](const EbtPlan& p, double snr) { return mean_rate_ebt_approx(p, MeanSnr(snr)); },
          py::arg("plan"), py::arg("mean_snr"));
    m.def("mean_rate_ebt_lower_bound",
          [](const EbtPlan& p, double snr) { return mean_rate_ebt_lower_bound(p, MeanSnr(snr)); },
          py::arg("plan"), py::arg("mean_snr"));
    m.def("mean_rate_conventional",
          [](double wc, double snr) { return mean_rate_conventional(ConvPlan(wc), MeanSnr(snr)); },
          py::arg("Wc"), py::arg("mean_snr"));
    m.def("equivalent_conventional_width", &equivalent_conventional_width, py::arg("plan"),
          py::arg("s"));

    m.def("derive_traffic_rates",
          [](double lam, int L, int s_max) {
              return derive_traffic_rates(lam, L, SlotDistribution::uniform(s_max));
          },
          py::arg("lam"), py::arg("L"), py::arg("s_max"));
    m.def("admitted_pmf", &admitted_pmf, py::arg("lam"), py::arg("L"), py::arg("a"));
    m.def("psi", &psi, py::arg("theta"), py::arg("plan"), py::arg("rates"), py::arg("N"));
    m.def("minimize_psi", &minimize_psi, py::arg("plan"), py::arg("rates"), py::arg("N"));
    m.def("min_psi_conventional", &min_psi_conventional, py::arg("Wc"), py::arg("rates"),
          py::arg("N"));
    m.def("chernoff_outage_bound", &chernoff_outage_bound, py::arg("plan"), py::arg("rates"),
          py::arg("N"));
    m.def("feasibility_check", &feasibility_check, py::arg("rates"), py::arg("N"), py::arg("d"));

    m.def("optimal_wbar_for_w",
          [](int W, const SystemParams& p) { return optimal_wbar_for_w(W, p, p.traffic()); },
          py::arg("W"), py::arg("params"));
    m.def("optimize_ebt", &optimize_ebt, py::arg("params"));
    m.def("optimize_conventional", &optimize_conventional, py::arg("params"));

    m.def(
        "simulate",
        [](const SystemParams& p, std::optional<EbtPlan> plan, std::optional<int> wc,
           std::int64_t slots, std::uint64_t seed) {
            if (plan.has_value() == wc.has_value())
                throw ConfigError("give exactly one of plan (EBT) or Wc (conventional)");
            SimOptions options;
            options.horizon_slots = slots;
            options.seed = seed;
            const SimPolicy policy = plan ? SimPolicy::ebt(*plan) : SimPolicy::conventional(*wc);
            py::gil_scoped_release release;
            return run_simulation(p, policy, options);
        },
        py::arg("params"), py::arg("plan") = py::none(), py::arg("Wc") = py::none(),
        py::arg("slots") = 100000, py::arg("seed") = 1);

    m.def("preset_config",
          [](const std::string& name) { return config_to_json(preset(name)).dump(); },
          py::arg("name"), "JSON text of a built-in preset config");
    m.def(
        "run_experiment",
        [](const std::string& config_json) {
            const ExperimentConfig config = parse_config(config_json);
            ExperimentResult result;
            {
                py::gil_scoped_release release;
                result = run_experiment(config);
            }
            return py::make_tuple(rows_to_csv(result.rows), summary_json(result).dump());
        },
        py::arg("config_json"), "Runs a config; returns (csv_text, summary_json_text)");
}
