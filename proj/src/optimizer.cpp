#include "ebt/optimizer.hpp"

#include "ebt/errors.hpp"

#include <cmath>

namespace ebt {

void SystemParams::validate() const {
    if (channels < 1) throw ConfigError("N must be >= 1");
    if (!(arrival_rate >= 0.0) || !std::isfinite(arrival_rate))
        throw ConfigError("lambda must be finite and >= 0");
    if (preambles < 1) throw ConfigError("L must be >= 1");
    if (!(qos_exponent > 0.0) || !std::isfinite(qos_exponent))
        throw ConfigError("d must be positive");
}

TrafficRates SystemParams::traffic() const {
    return derive_traffic_rates(arrival_rate, preambles, slots);
}

std::optional<int> optimal_wbar_for_w(int explore, const SystemParams& params,
                                      const TrafficRates& rates, int* evaluations) {
    if (explore < 1) throw DomainError("W must be >= 1");
    std::optional<int> best;
    for (int keep = 1; keep <= explore; ++keep) {
        const EbtPlan plan(explore, keep);
        if (evaluations) ++*evaluations;
        double psi_star;
        try {
            psi_star = minimize_psi(plan, rates, params.channels).psi_star;
        } catch (const InfeasibleError&) {
            // min psi = psi(0) = 0 > -d
            break;
        }
        if (psi_star > -params.qos_exponent) break;
        best = keep;
    }
    return best;
}

EbtSolution optimize_ebt(const SystemParams& params) {
    params.validate();
    EbtSolution solution;
    if (params.arrival_rate == 0.0) return solution;
    const TrafficRates rates = params.traffic();
    if (!feasibility_check(rates, params.channels, params.qos_exponent)) return solution;

    for (int explore = 1; explore <= params.channels; ++explore) {
        const auto keep = optimal_wbar_for_w(explore, params, rates, &solution.psi_evaluations);
        if (!keep) break;
        const EbtPlan plan(explore, *keep);
        const double rate = mean_rate_ebt(plan, params.snr);
        if (!solution.plan || rate > solution.rate) {
            solution.plan = plan;
            solution.rate = rate;
        }
    }
    if (solution.plan)
        solution.psi_star = minimize_psi(*solution.plan, rates, params.channels).psi_star;
    return solution;
}

ConvSolution optimize_conventional(const SystemParams& params) {
    params.validate();
    ConvSolution solution;
    if (params.arrival_rate == 0.0) return solution;
    const TrafficRates rates = params.traffic();
    for (int width = 1; width <= params.channels; ++width) {
        if (!(params.channels > width * rates.total())) break;
        const PsiResult r = min_psi_conventional(width, rates, params.channels);
        if (r.psi_star > -params.qos_exponent) break;
        solution.width = width;
        solution.psi_star = r.psi_star;
    }
    if (solution.width)
        solution.rate = mean_rate_conventional(ConvPlan(*solution.width), params.snr);
    return solution;
}

OptimizationOutcome optimize(const SystemParams& params) {
    return {optimize_ebt(params), optimize_conventional(params)};
}

}  // namespace ebt
