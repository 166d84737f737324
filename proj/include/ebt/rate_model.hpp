#pragma once

// Mean per-data-slot transmission rate (bits/s/Hz summed over kept channels) under iid
// Rayleigh fading, for EBT and for blind allocation.

#include "ebt/specfun.hpp"

namespace ebt {

/// Channels explored in the pilot slot and channels kept for the data slots.
struct EbtPlan {
    int explore;  // W
    int keep;     // Wbar

    EbtPlan(int explore, int keep);

    friend bool operator==(const EbtPlan&, const EbtPlan&) = default;
};

/// Blind allocation width. Real-valued for rate comparisons; the optimizer uses integers.
struct ConvPlan {
    double width;  // Wc

    explicit ConvPlan(double width);
};

// The alternating closed form is only evaluated up to this many explored channels.
inline constexpr int kExactRateMaxExplore = 30;

/// Closed form (binomial expansion over order statistics, E1 terms) of R(W, Wbar).
/// Throws OverflowGuardError for W > kExactRateMaxExplore.
double mean_rate_ebt_exact(const EbtPlan& plan, MeanSnr snr);

/// R(W, Wbar) by adaptive quadrature of log2(1 + snr x) against the kept order-statistic
/// densities. Valid for any W up to kMaxOrderStatSize.
double mean_rate_ebt_quadrature(const EbtPlan& plan, MeanSnr snr);

/// Exact form when W <= kExactRateMaxExplore, quadrature otherwise.
double mean_rate_ebt(const EbtPlan& plan, MeanSnr snr);

/// Wc * E[log2(1 + gamma)] = Wc e^{1/snr} E1(1/snr) / ln 2.
double mean_rate_conventional(ConvPlan plan, MeanSnr snr);

/// Large-W approximation sum_{i=1}^{Wbar} log2(1 + snr ln(W/i)). Requires Wbar < W.
double mean_rate_ebt_approx(const EbtPlan& plan, MeanSnr snr);

/// Wbar log2(1 + snr ln(W/Wbar)), the smallest term of the approximation times Wbar.
double mean_rate_ebt_lower_bound(const EbtPlan& plan, MeanSnr snr);

/// Blind width using the same channel-slots as EBT over 1 + s slots: (W + s Wbar)/(1 + s).
double equivalent_conventional_width(const EbtPlan& plan, int data_slots);

}  // namespace ebt
