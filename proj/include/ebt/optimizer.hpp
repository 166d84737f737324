#pragma once

// Rate maximization under the QoS-exponent constraint min_theta psi <= -d.

#include "ebt/outage_model.hpp"
#include "ebt/rate_model.hpp"

#include <optional>

namespace ebt {

struct SystemParams {
    int channels;           // N
    double arrival_rate;    // lambda, mean new active UEs per slot
    int preambles;          // L
    SlotDistribution slots;
    MeanSnr snr;
    double qos_exponent;    // d, target Pr(Q > N) <= e^{-d}

    /// Throws ConfigError on invalid values. lambda = 0 is accepted (empty traffic).
    void validate() const;
    TrafficRates traffic() const;
};

struct EbtSolution {
    std::optional<EbtPlan> plan;
    double rate = 0.0;
    double psi_star = 0.0;
    int psi_evaluations = 0;  // calls to minimize_psi

    bool feasible() const noexcept { return plan.has_value(); }
};

struct ConvSolution {
    std::optional<int> width;
    double rate = 0.0;
    double psi_star = 0.0;

    bool feasible() const noexcept { return width.has_value(); }
};

struct OptimizationOutcome {
    EbtSolution ebt;
    ConvSolution conventional;

    bool feasible() const noexcept { return ebt.feasible() && conventional.feasible(); }
};

/// Largest Wbar in 1..W with min psi(W, Wbar) <= -d, scanning upward from 1 and stopping at
/// the first violation. Empty when Wbar = 1 already violates.
/// `evaluations`, if given, is incremented once per minimize_psi call.
std::optional<int> optimal_wbar_for_w(int explore, const SystemParams& params,
                                      const TrafficRates& rates, int* evaluations = nullptr);

/// Scans W = 1, 2, ... (up to N) and stops at the first W without a feasible Wbar; returns the
/// feasible pair with the highest mean rate, preferring the smaller W on ties.
EbtSolution optimize_ebt(const SystemParams& params);

/// Largest integer Wc whose closed-form min psi is <= -d.
ConvSolution optimize_conventional(const SystemParams& params);

OptimizationOutcome optimize(const SystemParams& params);

}  // namespace ebt
