#pragma once

// Slotted Monte Carlo of the uplink: Poisson arrivals, preamble contention, pilot slot on W
// channels, s data slots on the Wbar best ones, and outage whenever demand exceeds N.

#include "ebt/optimizer.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace ebt {

/// Counter-keyed SplitMix64 stream. Each (seed, slot, stream) triple names an independent
/// sequence, so a run is reproducible regardless of how work is ordered.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t slot, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()();

private:
    std::uint64_t state_;
};

enum class PolicyKind { ebt, conventional };

struct SimPolicy {
    PolicyKind kind;
    int explore;  // channels held in the pilot slot
    int keep;     // channels held in each data slot

    static SimPolicy ebt(const EbtPlan& plan) { return {PolicyKind::ebt, plan.explore, plan.keep}; }
    static SimPolicy conventional(int width);
};

enum class UePhase { exploring, transmitting };

struct ActiveUe {
    int remaining_data_slots;
    int kept_channels;
    double achieved_rate_per_slot;
    UePhase phase;
};

struct SlotLedger {
    std::int64_t slot_index;
    std::int64_t demand;  // Q
    bool outage;
    int new_arrivals;     // K
    int admitted;         // Z
    int exploring;        // UEs in their pilot slot (0 after an outage drop)
    std::int64_t transmitting;
};

struct SimMetrics {
    std::int64_t slot_count = 0;
    std::int64_t outage_count = 0;
    std::int64_t ue_count = 0;       // admitted and served
    std::int64_t dropped_ue_count = 0;
    std::int64_t admitted_sum = 0;   // sum of Z over measured slots
    std::int64_t data_slot_count = 0;
    double rate_sum = 0.0;           // sum of per-slot rates over measured data slots
    std::uint64_t rng_seed = 0;

    double outage_fraction() const;
    /// Empty when no data slot fell inside the measured window.
    std::optional<double> mean_rate_per_data_slot() const;
    /// Binomial standard error of outage_fraction.
    double outage_standard_error() const;

    /// Pools another run's counts (associative and commutative up to float addition order).
    void merge(const SimMetrics& other);
};

struct QosExponent {
    double value;
    bool censored;  // no outage observed; value is the lower bound ln(slot_count)
};

struct SimOptions {
    std::int64_t horizon_slots = 1'000'000;
    std::uint64_t seed = 1;
    /// Slots excluded at the start; defaults to s_max.
    std::optional<std::int64_t> warmup_slots;
    std::function<void(const SlotLedger&)> trace;
};

/// Number of preambles (out of L) picked by exactly one of the K contending UEs.
int simulate_preamble_step(int contenders, int preambles, CounterRng& rng);

/// Fills `out` with iid exponential SNRs of the given mean.
void draw_snrs(std::span<double> out, MeanSnr snr, CounterRng& rng);
std::vector<double> draw_snrs(int count, MeanSnr snr, CounterRng& rng);

struct Selection {
    std::vector<double> kept;  // descending SNR
    std::vector<int> indices;  // channel index of each kept value
    double rate;               // sum of log2(1 + snr) over kept
};

/// Keeps the `keep` largest SNRs, lowest index first among ties.
Selection select_best_channels(std::span<const double> snrs, int keep);

SimMetrics run_simulation(const SystemParams& params, const SimPolicy& policy,
                          const SimOptions& options);

QosExponent empirical_qos_exponent(const SimMetrics& metrics);

}  // namespace ebt
