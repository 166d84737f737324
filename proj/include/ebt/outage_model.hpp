#pragma once

// Poisson traffic model for channel demand Q = W Y0 + Wbar V and the Chernoff bound
// Pr(Q > N) <= exp(min_theta psi(theta)).

#include "ebt/rate_model.hpp"

#include <span>
#include <vector>

namespace ebt {

/// pmf of the number of data slots a UE needs, over s = 1..s_max.
class SlotDistribution {
public:
    /// pmf[i] is the probability of s = i + 1. Must be nonnegative and sum to 1 within 1e-12.
    explicit SlotDistribution(std::vector<double> pmf);

    static SlotDistribution uniform(int max_slots);

    int max_slots() const noexcept { return static_cast<int>(pmf_.size()); }
    double probability(int slots) const;
    /// sum_{i >= slots} nu_i
    double tail(int slots) const;
    double mean() const noexcept { return mean_; }
    std::span<const double> pmf() const noexcept { return pmf_; }

private:
    std::vector<double> pmf_;
    double mean_;
};

/// Intensities of the Poisson counts making up the channel demand.
struct TrafficRates {
    double admitted;  // lambda0 = lambda e^{-lambda/L}, newly admitted UEs per slot
    double residual;  // lambda1 = lambda0 * sbar, UEs in their data phase

    double total() const noexcept { return admitted + residual; }
};

struct PsiResult {
    double theta_star;
    double psi_star;
    double bound;  // exp(psi_star)
};

TrafficRates derive_traffic_rates(double arrival_rate, int preambles, const SlotDistribution& slots);

/// Pr(Z = a) for Z ~ Bin(L, (lambda/L) e^{-lambda/L}), the number of collision-free UEs.
double admitted_pmf(double arrival_rate, int preambles, int admitted);

/// lambda0 e^{W theta} + lambda1 e^{Wbar theta} - (lambda0 + lambda1 + N theta).
/// Returns +inf once the exponentials leave the double range.
double psi(double theta, const EbtPlan& plan, const TrafficRates& rates, int channels);

/// Minimizes psi over theta >= 0 by bisection on the stationarity condition
/// lambda0 W e^{W theta} + lambda1 Wbar e^{Wbar theta} = N.
/// Throws InfeasibleError when lambda0 W + lambda1 Wbar > N.
PsiResult minimize_psi(const EbtPlan& plan, const TrafficRates& rates, int channels);

/// Closed form of the minimum for W = Wbar = Wc:
/// (N/Wc)(1 - ln(N/(Wc lambda_c))) - lambda_c. Throws InfeasibleError unless N > Wc lambda_c.
PsiResult min_psi_conventional(int width, const TrafficRates& rates, int channels);

/// exp(min psi), an upper bound on Pr(Q > N) under the Poisson model.
double chernoff_outage_bound(const EbtPlan& plan, const TrafficRates& rates, int channels);

/// True iff some plan can meet Pr(Q > N) <= e^{-d}: N >= lambda_c and
/// N(1 - ln(N/lambda_c)) - lambda_c <= -d.
bool feasibility_check(const TrafficRates& rates, int channels, double qos_exponent);

}  // namespace ebt
