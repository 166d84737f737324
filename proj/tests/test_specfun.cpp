#include "ebt/errors.hpp"
#include "ebt/specfun.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace ebt;

TEST_CASE("E1 reference values") {
    CHECK(exp_integral_e1(1.0) == doctest::Approx(0.21938393439552).epsilon(1e-12));
    CHECK(exp_integral_e1(10.0) == doctest::Approx(4.156968929685324e-6).epsilon(1e-12));
}

TEST_CASE("E1 against quadrature across both evaluation regimes") {
    for (double x : {1e-8, 1e-3, 0.05, 0.3, 0.9, 1.2, 1.4999, 1.5, 1.5001, 2.0, 3.7, 8.0, 25.0,
                     120.0, 600.0}) {
        CAPTURE(x);
        const double ref = oracle::e1(x);
        CHECK(std::abs(exp_integral_e1(x) - ref) <= 1e-12 * ref);
    }
}

TEST_CASE("E1 scaled form stays finite where E1 underflows") {
    // e^x E1(x) ~ 1/x (1 - 1/x + 2/x^2 ...)
    const double x = 1e4;
    CHECK(exp_scaled_e1(x) == doctest::Approx((1.0 - 1.0 / x + 2.0 / (x * x)) / x).epsilon(1e-11));
    CHECK(exp_integral_e1(x) == 0.0);
}

TEST_CASE("E1 domain") {
    CHECK_THROWS_AS(exp_integral_e1(0.0), DomainError);
    CHECK_THROWS_AS(exp_integral_e1(-1.0), DomainError);
    CHECK_THROWS_AS(exp_integral_e1(std::numeric_limits<double>::quiet_NaN()), DomainError);
    CHECK_THROWS_AS(exp_integral_e1(std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("E1 is strictly decreasing and within its elementary bracket") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> log_x(-6.0, 2.5);
    for (int i = 0; i < 2000; ++i) {
        const double a = std::pow(10.0, log_x(gen));
        const double b = a * (1.0 + 1e-3);
        CHECK(exp_integral_e1(a) > exp_integral_e1(b));
        const double upper = std::exp(-a) * std::log1p(1.0 / a);
        CHECK(exp_integral_e1(a) < upper);
        CHECK(exp_integral_e1(a) > 0.5 * upper);
    }
}

TEST_CASE("MeanSnr conversion") {
    CHECK(MeanSnr::from_db(10.0).linear() == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(MeanSnr::from_db(0.0).linear() == 1.0);
    CHECK(MeanSnr(4.0).db() == doctest::Approx(10.0 * std::log10(4.0)));
    CHECK_THROWS_AS(MeanSnr(0.0), DomainError);
    CHECK_THROWS_AS(MeanSnr(-1.0), DomainError);
}

TEST_CASE("harmonic numbers") {
    CHECK(harmonic_number(0) == 0.0);
    CHECK(harmonic_number(4) == doctest::Approx(25.0 / 12.0).epsilon(1e-15));
    double direct = 0.0;
    for (int k = 1; k <= 20000; ++k) direct += 1.0 / k;
    CHECK(harmonic_number(20000) == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("order statistic pdf closed cases") {
    for (double x : {0.0, 0.1, 1.0, 3.0, 20.0}) {
        CHECK(order_stat_pdf(1, 1, x) == doctest::Approx(std::exp(-x)).epsilon(1e-14));
        CHECK(order_stat_pdf(2, 2, x) ==
              doctest::Approx(2.0 * (1.0 - std::exp(-x)) * std::exp(-x)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(order_stat_pdf(0, 3, 1.0), IndexError);
    CHECK_THROWS_AS(order_stat_pdf(4, 3, 1.0), IndexError);
}

TEST_CASE("order statistic densities partition the parent sample") {
    for (int W = 1; W <= 30; ++W) {
        for (double x : {0.0, 1e-4, 0.2, 0.7, 1.5, 4.0, 9.0, 30.0}) {
            double sum = 0.0;
            for (int w = 1; w <= W; ++w) sum += order_stat_pdf(w, W, x);
            CAPTURE(W);
            CAPTURE(x);
            CHECK(std::abs(sum - W * std::exp(-x)) <= 1e-10 * std::max(1.0, W * std::exp(-x)));
        }
    }
}

TEST_CASE("order statistic densities integrate to one") {
    for (int W : {1, 2, 3, 7, 12, 20, 30}) {
        for (int w = 1; w <= W; ++w) {
            const double mass =
                oracle::integrate_half_line([&](double x) { return order_stat_pdf(w, W, x); });
            CAPTURE(W);
            CAPTURE(w);
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("order statistic means") {
    CHECK(order_stat_mean(1, 1, 3.5) == doctest::Approx(3.5));
    CHECK(order_stat_mean(4, 4, 1.0) == doctest::Approx(25.0 / 12.0).epsilon(1e-15));
    CHECK(order_stat_mean(2, 3, 1.0) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    CHECK_THROWS_AS(order_stat_mean(5, 4, 1.0), IndexError);

    // Monte Carlo over 10^6 draws.
    std::mt19937_64 gen(11);
    std::exponential_distribution<double> e(1.0);
    const int n = 1'000'000;
    double max_sum = 0.0, max_sq = 0.0, mid_sum = 0.0, mid_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        double a = e(gen), b = e(gen), c = e(gen), d = e(gen);
        const double m4 = std::max({a, b, c, d});
        max_sum += m4;
        max_sq += m4 * m4;
        // second smallest of three
        const double mid = std::max(std::min(a, b), std::min(std::max(a, b), c));
        mid_sum += mid;
        mid_sq += mid * mid;
    }
    auto within = [n](double sum, double sq, double expected) {
        const double m = sum / n;
        const double se = std::sqrt((sq / n - m * m) / n);
        return std::abs(m - expected) <= 3.0 * se;
    };
    CHECK(within(max_sum, max_sq, order_stat_mean(4, 4, 1.0)));
    CHECK(within(mid_sum, mid_sq, order_stat_mean(2, 3, 1.0)));
}

TEST_CASE("cdf at the order statistic mean lies in [w/(W+1), w/W]") {
    for (int W = 2; W <= 100; ++W) {
        for (int w = 1; w < W; ++w) {
            const double F = -std::expm1(-order_stat_mean(w, W, 1.0));
            CAPTURE(W);
            CAPTURE(w);
            CHECK(F >= static_cast<double>(w) / (W + 1));
            CHECK(F <= static_cast<double>(w) / W);
        }
    }
}
