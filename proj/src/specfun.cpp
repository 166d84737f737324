#include "ebt/specfun.hpp"

#include "e1_impl.hpp"
#include "ebt/errors.hpp"

#include <cmath>
#include <string>

namespace ebt {

namespace {

constexpr int kHarmonicDirectLimit = 10000;

void check_order_index(int w, int W) {
    if (W < 1 || W > kMaxOrderStatSize)
        throw IndexError("sample size W=" + std::to_string(W) + " outside [1, " +
                         std::to_string(kMaxOrderStatSize) + "]");
    if (w < 1 || w > W)
        throw IndexError("order index w=" + std::to_string(w) + " outside [1, " +
                         std::to_string(W) + "]");
}

}  // namespace

MeanSnr::MeanSnr(double linear) : linear_(linear) {
    if (!(linear > 0.0) || !std::isfinite(linear))
        throw DomainError("mean SNR must be positive and finite");
}

MeanSnr MeanSnr::from_db(double db) {
    if (!std::isfinite(db)) throw DomainError("mean SNR in dB must be finite");
    return MeanSnr(std::pow(10.0, db / 10.0));
}

double MeanSnr::db() const noexcept { return 10.0 * std::log10(linear_); }

double exp_integral_e1(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("E1 requires finite x > 0");
    if (x < detail::kE1SeriesCutoff) return detail::e1_series(x);
    return std::exp(-x) * detail::e1_scaled_continued_fraction(x);
}

double exp_scaled_e1(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("E1 requires finite x > 0");
    return detail::exp_scaled_e1(x);
}

double harmonic_number(int n) {
    if (n < 0) throw DomainError("harmonic number of negative order");
    if (n <= kHarmonicDirectLimit) {
        // Summed smallest-first to keep the rounding error at a few ulps.
        double h = 0.0;
        for (int k = n; k >= 1; --k) h += 1.0 / k;
        return h;
    }
    const double x = n;
    const double inv2 = 1.0 / (x * x);
    return std::log(x) + 0.57721566490153286061 + 0.5 / x -
           inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
}

double order_stat_pdf(int w, int W, double x) {
    check_order_index(w, W);
    if (!(x >= 0.0)) throw DomainError("order statistic density needs x >= 0");
    const double log_coeff =
        std::lgamma(W + 1.0) - std::lgamma(static_cast<double>(w)) - std::lgamma(W - w + 1.0);
    double log_density = log_coeff - (W - w + 1.0) * x;
    if (w > 1) {
        if (x == 0.0) return 0.0;
        log_density += (w - 1.0) * std::log(-std::expm1(-x));
    }
    return std::exp(log_density);
}

double order_stat_mean(int w, int W, double mean) {
    check_order_index(w, W);
    if (!(mean > 0.0)) throw DomainError("exponential mean must be positive");
    // H_W - H_{W-w} = sum_{k=W-w+1}^{W} 1/k
    double sum = 0.0;
    for (int k = W; k > W - w; --k) sum += 1.0 / k;
    return mean * sum;
}

}  // namespace ebt
