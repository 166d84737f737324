#include "ebt/outage_model.hpp"

#include "ebt/errors.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ebt {

namespace {

constexpr double kPmfSumTolerance = 1e-12;
// exp() overflows a double just above 709.78.
constexpr double kMaxExponent = 709.0;

void check_channels(int channels) {
    if (channels < 1) throw DomainError("channel count N must be >= 1");
}

// lambda0 W e^{W theta} + lambda1 Wbar e^{Wbar theta}
double stationarity_lhs(double theta, const EbtPlan& plan, const TrafficRates& rates) {
    return rates.admitted * plan.explore * std::exp(plan.explore * theta) +
           rates.residual * plan.keep * std::exp(plan.keep * theta);
}

}  // namespace

SlotDistribution::SlotDistribution(std::vector<double> pmf) : pmf_(std::move(pmf)), mean_(0.0) {
    if (pmf_.empty()) throw DomainError("slot distribution needs at least one entry");
    // Extended accumulation so e.g. the uniform s_max = 10 pmf yields sbar = 5.5 exactly.
    long double total = 0.0L;
    long double mean = 0.0L;
    for (std::size_t i = 0; i < pmf_.size(); ++i) {
        if (!(pmf_[i] >= 0.0) || !std::isfinite(pmf_[i]))
            throw DomainError("slot probabilities must be finite and nonnegative");
        total += pmf_[i];
        mean += static_cast<long double>(i + 1) * pmf_[i];
    }
    mean_ = static_cast<double>(mean);
    if (std::abs(total - 1.0) > kPmfSumTolerance)
        throw DomainError("slot probabilities sum to " + std::to_string(static_cast<double>(total)) +
                          ", not 1");
}

SlotDistribution SlotDistribution::uniform(int max_slots) {
    if (max_slots < 1) throw DomainError("s_max must be >= 1");
    return SlotDistribution(std::vector<double>(max_slots, 1.0 / max_slots));
}

double SlotDistribution::probability(int slots) const {
    if (slots < 1 || slots > max_slots())
        throw IndexError("slot count " + std::to_string(slots) + " outside the support");
    return pmf_[slots - 1];
}

double SlotDistribution::tail(int slots) const {
    if (slots <= 1) return 1.0;
    if (slots > max_slots()) return 0.0;
    return static_cast<double>(
        std::accumulate(pmf_.begin() + (slots - 1), pmf_.end(), 0.0L));
}

TrafficRates derive_traffic_rates(double arrival_rate, int preambles,
                                  const SlotDistribution& slots) {
    if (!(arrival_rate > 0.0) || !std::isfinite(arrival_rate))
        throw DomainError("arrival rate lambda must be positive");
    if (preambles < 1) throw DomainError("preamble pool size L must be >= 1");
    const double admitted = arrival_rate * std::exp(-arrival_rate / preambles);
    return {admitted, admitted * slots.mean()};
}

double admitted_pmf(double arrival_rate, int preambles, int admitted) {
    if (!(arrival_rate >= 0.0)) throw DomainError("arrival rate lambda must be nonnegative");
    if (preambles < 1) throw DomainError("preamble pool size L must be >= 1");
    if (admitted < 0 || admitted > preambles)
        throw IndexError("admitted count " + std::to_string(admitted) + " outside [0, L]");
    const double load = arrival_rate / preambles;
    const double p = load * std::exp(-load);
    if (p == 0.0) return admitted == 0 ? 1.0 : 0.0;
    const double log_choose = std::lgamma(preambles + 1.0) - std::lgamma(admitted + 1.0) -
                              std::lgamma(preambles - admitted + 1.0);
    return std::exp(log_choose + admitted * std::log(p) + (preambles - admitted) * std::log1p(-p));
}

double psi(double theta, const EbtPlan& plan, const TrafficRates& rates, int channels) {
    if (!(theta >= 0.0)) throw DomainError("Chernoff parameter theta must be >= 0");
    if (plan.explore * theta > kMaxExponent) return std::numeric_limits<double>::infinity();
    return rates.admitted * std::expm1(plan.explore * theta) +
           rates.residual * std::expm1(plan.keep * theta) - channels * theta;
}

PsiResult minimize_psi(const EbtPlan& plan, const TrafficRates& rates, int channels) {
    check_channels(channels);
    const double n = channels;
    if (stationarity_lhs(0.0, plan, rates) > n)
        throw InfeasibleError("lambda0 W + lambda1 Wbar exceeds N; psi is minimized at theta = 0");

    double lo = 0.0;
    double hi = 1.0 / plan.explore;
    while (stationarity_lhs(hi, plan, rates) < n) {
        lo = hi;
        hi *= 2.0;
    }
    // The LHS is strictly increasing, so bisection always brackets the root.
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (stationarity_lhs(mid, plan, rates) < n)
            lo = mid;
        else
            hi = mid;
    }
    const double theta = 0.5 * (lo + hi);
    const double value = psi(theta, plan, rates, channels);
    return {theta, value, std::exp(value)};
}

PsiResult min_psi_conventional(int width, const TrafficRates& rates, int channels) {
    check_channels(channels);
    if (width < 1) throw DomainError("conventional width must be >= 1");
    const double lc = rates.total();
    const double n = channels;
    if (!(n > width * lc))
        throw InfeasibleError("N must exceed Wc * lambda_c for the conventional minimizer");
    const double log_ratio = std::log(n / (width * lc));
    const double value = (n / width) * (1.0 - log_ratio) - lc;
    return {log_ratio / width, value, std::exp(value)};
}

double chernoff_outage_bound(const EbtPlan& plan, const TrafficRates& rates, int channels) {
    return minimize_psi(plan, rates, channels).bound;
}

bool feasibility_check(const TrafficRates& rates, int channels, double qos_exponent) {
    const double lc = rates.total();
    const double n = channels;
    if (!(lc > 0.0) || n < lc) return false;
    return n * (1.0 - std::log(n / lc)) - lc <= -qos_exponent;
}

}  // namespace ebt
