#include "ebt/simulator.hpp"

#include "ebt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace ebt {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
// Stream id for per-slot draws (arrivals, preamble picks); per-UE streams use the UE index.
constexpr std::uint64_t kSlotStream = std::uint64_t{1} << 63;

std::uint64_t mix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double best_channels_rate(std::span<double> snrs, int keep) {
    if (keep < static_cast<int>(snrs.size()))
        std::nth_element(snrs.begin(), snrs.begin() + keep, snrs.end(), std::greater<>());
    double rate = 0.0;
    for (int i = 0; i < keep; ++i) rate += std::log2(1.0 + snrs[i]);
    return rate;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t slot, std::uint64_t stream)
    : state_(mix64(mix64(mix64(seed) ^ slot) ^ stream)) {}

CounterRng::result_type CounterRng::operator()() {
    state_ += kGolden;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

SimPolicy SimPolicy::conventional(int width) {
    if (width < 1) throw DomainError("conventional width must be >= 1");
    return {PolicyKind::conventional, width, width};
}

double SimMetrics::outage_fraction() const {
    return slot_count == 0 ? 0.0 : static_cast<double>(outage_count) / slot_count;
}

std::optional<double> SimMetrics::mean_rate_per_data_slot() const {
    if (data_slot_count == 0) return std::nullopt;
    return rate_sum / data_slot_count;
}

double SimMetrics::outage_standard_error() const {
    if (slot_count == 0) return 0.0;
    const double p = outage_fraction();
    return std::sqrt(p * (1.0 - p) / slot_count);
}

void SimMetrics::merge(const SimMetrics& other) {
    slot_count += other.slot_count;
    outage_count += other.outage_count;
    ue_count += other.ue_count;
    dropped_ue_count += other.dropped_ue_count;
    admitted_sum += other.admitted_sum;
    data_slot_count += other.data_slot_count;
    rate_sum += other.rate_sum;
}

int simulate_preamble_step(int contenders, int preambles, CounterRng& rng) {
    if (preambles < 1) throw DomainError("preamble pool size L must be >= 1");
    if (contenders <= 0) return 0;
    std::vector<int> picks(preambles, 0);
    std::uniform_int_distribution<int> pick(0, preambles - 1);
    for (int k = 0; k < contenders; ++k) ++picks[pick(rng)];
    return static_cast<int>(std::count(picks.begin(), picks.end(), 1));
}

void draw_snrs(std::span<double> out, MeanSnr snr, CounterRng& rng) {
    std::exponential_distribution<double> fading(1.0 / snr.linear());
    for (double& v : out) v = fading(rng);
}

std::vector<double> draw_snrs(int count, MeanSnr snr, CounterRng& rng) {
    if (count < 0) throw DomainError("SNR count must be >= 0");
    std::vector<double> out(count);
    draw_snrs(std::span<double>(out), snr, rng);
    return out;
}

Selection select_best_channels(std::span<const double> snrs, int keep) {
    if (keep < 1 || keep > static_cast<int>(snrs.size()))
        throw IndexError("cannot keep " + std::to_string(keep) + " of " +
                         std::to_string(snrs.size()) + " channels");
    std::vector<int> order(snrs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return snrs[a] > snrs[b]; });
    Selection sel;
    sel.rate = 0.0;
    for (int i = 0; i < keep; ++i) {
        sel.indices.push_back(order[i]);
        sel.kept.push_back(snrs[order[i]]);
        sel.rate += std::log2(1.0 + snrs[order[i]]);
    }
    return sel;
}

SimMetrics run_simulation(const SystemParams& params, const SimPolicy& policy,
                          const SimOptions& options) {
    params.validate();
    if (policy.keep < 1 || policy.keep > policy.explore)
        throw ConfigError("policy needs 1 <= kept channels <= explored channels");
    if (policy.explore > params.channels)
        throw ConfigError("policy explores " + std::to_string(policy.explore) +
                          " channels but N = " + std::to_string(params.channels));
    const int s_max = params.slots.max_slots();
    const std::int64_t warmup = options.warmup_slots.value_or(s_max);
    if (warmup < 0 || options.horizon_slots <= warmup)
        throw ConfigError("simulation horizon must exceed the warm-up of " +
                          std::to_string(warmup) + " slots");

    SimMetrics metrics;
    metrics.rng_seed = options.seed;

    const auto pmf = params.slots.pmf();
    // Stateless between calls, so sharing it across keyed engines keeps draws keyed.
    std::discrete_distribution<int> slot_count_dist(pmf.begin(), pmf.end());

    // leaving[t % ring]: UEs whose last data slot is t - 1.
    const std::int64_t ring = s_max + 2;
    std::vector<std::int64_t> leaving(ring, 0);
    std::int64_t transmitting = 0;
    int exploring_prev = 0;
    std::vector<double> snr_buffer(policy.explore);
    std::vector<ActiveUe> newcomers;

    for (std::int64_t t = 0; t < options.horizon_slots; ++t) {
        transmitting += exploring_prev;
        transmitting -= leaving[t % ring];
        leaving[t % ring] = 0;

        CounterRng slot_rng(options.seed, static_cast<std::uint64_t>(t), kSlotStream);
        int arrivals = 0;
        if (params.arrival_rate > 0.0)
            arrivals = std::poisson_distribution<int>(params.arrival_rate)(slot_rng);
        const int admitted = simulate_preamble_step(arrivals, params.preambles, slot_rng);

        const std::int64_t demand =
            static_cast<std::int64_t>(policy.explore) * admitted + policy.keep * transmitting;
        const bool outage = demand > params.channels;
        const bool measured = t >= warmup;

        newcomers.clear();
        if (!outage) {
            for (int ue = 0; ue < admitted; ++ue) {
                CounterRng ue_rng(options.seed, static_cast<std::uint64_t>(t),
                                  static_cast<std::uint64_t>(ue));
                const int slots = slot_count_dist(ue_rng) + 1;
                draw_snrs(std::span<double>(snr_buffer), params.snr, ue_rng);
                const double rate = best_channels_rate(snr_buffer, policy.keep);
                newcomers.push_back({slots, policy.keep, rate, UePhase::exploring});
            }
            for (const ActiveUe& ue : newcomers) {
                ++leaving[(t + ue.remaining_data_slots + 1) % ring];
                // Data slots t+1 .. t+s, clipped to the measured window.
                const std::int64_t first = std::max<std::int64_t>(t + 1, warmup);
                const std::int64_t last =
                    std::min<std::int64_t>(t + ue.remaining_data_slots, options.horizon_slots - 1);
                if (last >= first) {
                    metrics.data_slot_count += last - first + 1;
                    metrics.rate_sum += ue.achieved_rate_per_slot * static_cast<double>(last - first + 1);
                }
                if (measured) ++metrics.ue_count;
            }
            exploring_prev = admitted;
        } else {
            exploring_prev = 0;
            if (measured) metrics.dropped_ue_count += admitted;
        }

        if (measured) {
            ++metrics.slot_count;
            metrics.outage_count += outage ? 1 : 0;
            metrics.admitted_sum += admitted;
        }
        if (options.trace)
            options.trace({t, demand, outage, arrivals, admitted, outage ? 0 : admitted,
                           transmitting});
    }
    return metrics;
}

QosExponent empirical_qos_exponent(const SimMetrics& metrics) {
    if (metrics.slot_count == 0) throw DomainError("no measured slots");
    if (metrics.outage_count == 0)
        return {std::log(static_cast<double>(metrics.slot_count)), true};
    return {-std::log(metrics.outage_fraction()), false};
}

}  // namespace ebt
