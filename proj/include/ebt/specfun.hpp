#pragma once

// Exponential integral and order statistics of a unit-mean exponential parent.
// Everything here is a pure function.

namespace ebt {

// Largest sample size accepted by the order-statistic helpers.
inline constexpr int kMaxOrderStatSize = 10000;

/// Mean SNR of a Rayleigh channel (linear scale). Constructed from linear or dB values.
class MeanSnr {
public:
    explicit MeanSnr(double linear);

    static MeanSnr from_db(double db);

    double linear() const noexcept { return linear_; }
    double db() const noexcept;

private:
    double linear_;
};

/// E1(x) = \int_1^\infty e^{-xt}/t dt for x > 0.
double exp_integral_e1(double x);

/// e^x E1(x). Finite for all x > 0 where E1 alone would underflow.
double exp_scaled_e1(double x);

/// H_n = 1 + 1/2 + ... + 1/n, with H_0 = 0.
double harmonic_number(int n);

/// Density of the w-th smallest of W iid Exp(1) samples at x >= 0.
double order_stat_pdf(int w, int W, double x);

/// E[gamma_(w)] for the w-th smallest of W iid exponentials with the given mean.
double order_stat_mean(int w, int W, double mean);

}  // namespace ebt
