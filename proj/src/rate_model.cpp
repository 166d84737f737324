#include "ebt/rate_model.hpp"

#include "e1_impl.hpp"
#include "ebt/errors.hpp"
#include "gauss_kronrod.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace ebt {

namespace {

// The binomial sum cancels about log10(W C(W-1,w-1) C(w-1,m)) digits, ~17 at W = 30,
// so it is carried out with a 113-bit significand.
using Wide = boost::multiprecision::cpp_bin_float_quad;

constexpr double kQuadratureRelTol = 1e-12;

void require_approx_regime(const EbtPlan& plan) {
    if (plan.keep >= plan.explore)
        throw DomainError("large-W approximation needs Wbar < W (got W=" +
                          std::to_string(plan.explore) + ", Wbar=" + std::to_string(plan.keep) +
                          ")");
}

}  // namespace

EbtPlan::EbtPlan(int explore, int keep) : explore(explore), keep(keep) {
    if (keep < 1 || keep > explore)
        throw DomainError("EBT plan needs 1 <= Wbar <= W (got W=" + std::to_string(explore) +
                          ", Wbar=" + std::to_string(keep) + ")");
}

ConvPlan::ConvPlan(double width) : width(width) {
    if (!(width > 0.0) || !std::isfinite(width))
        throw DomainError("conventional width must be positive");
}

double mean_rate_ebt_exact(const EbtPlan& plan, MeanSnr snr) {
    const int W = plan.explore;
    if (W > kExactRateMaxExplore)
        throw OverflowGuardError("closed-form rate limited to W <= " +
                                 std::to_string(kExactRateMaxExplore) + ", use quadrature");

    // g[a] = \int_0^\infty log2(1 + snr x) e^{-a x} dx = e^{a/snr} E1(a/snr) / (a ln 2)
    const Wide mean = snr.linear();
    const Wide ln2 = boost::math::constants::ln_two<Wide>();
    std::vector<Wide> g(W + 1);
    for (int a = 1; a <= W; ++a) g[a] = detail::exp_scaled_e1(Wide(a) / mean) / (Wide(a) * ln2);

    // binom[n][k], n < W
    std::vector<std::vector<Wide>> binom(W);
    for (int n = 0; n < W; ++n) {
        binom[n].assign(n + 1, Wide(1));
        for (int k = 1; k < n; ++k) binom[n][k] = binom[n - 1][k - 1] + binom[n - 1][k];
    }

    Wide total = 0;
    for (int w = W - plan.keep + 1; w <= W; ++w) {
        Wide inner = 0;
        for (int m = 0; m < w; ++m) {
            const Wide term = binom[w - 1][m] * g[W - w + 1 + m];
            if (m % 2 == 0)
                inner += term;
            else
                inner -= term;
        }
        total += Wide(W) * binom[W - 1][w - 1] * inner;
    }
    return total.convert_to<double>();
}

double mean_rate_ebt_quadrature(const EbtPlan& plan, MeanSnr snr) {
    const int W = plan.explore;
    if (W > kMaxOrderStatSize)
        throw DomainError("quadrature rate limited to W <= " + std::to_string(kMaxOrderStatSize));
    const int first = W - plan.keep + 1;

    // log of W!/((w-1)!(W-w)!) for each kept order statistic
    std::vector<double> log_coeff;
    log_coeff.reserve(plan.keep);
    for (int w = first; w <= W; ++w)
        log_coeff.push_back(std::lgamma(W + 1.0) - std::lgamma(static_cast<double>(w)) -
                            std::lgamma(W - w + 1.0));

    const double mean = snr.linear();
    auto integrand = [&](double x) {
        if (x <= 0.0) return 0.0;
        const double log_cdf = std::log(-std::expm1(-x));
        double density = 0.0;
        for (int i = 0; i < plan.keep; ++i) {
            const int w = first + i;
            density += std::exp(log_coeff[i] + (w - 1) * log_cdf - (W - w + 1.0) * x);
        }
        return std::log2(1.0 + mean * x) * density;
    };

    // Past ln W + 40 the kept mass is below W e^{-x} < 5e-18.
    const double log_w = std::log(static_cast<double>(W));
    const double upper = log_w + 40.0;
    std::vector<double> breaks = {0.0, 1.0};
    if (log_w > 2.0) breaks.push_back(log_w);
    breaks.push_back(log_w + 4.0);
    breaks.push_back(log_w + 12.0);
    breaks.push_back(upper);

    const auto result = detail::integrate_adaptive(integrand, breaks, kQuadratureRelTol, 1e-300);
    if (!result.converged)
        throw NumericalError("rate quadrature did not converge (estimated error " +
                                 std::to_string(result.error) + ")",
                             result.error);
    return result.value;
}

double mean_rate_ebt(const EbtPlan& plan, MeanSnr snr) {
    if (plan.explore <= kExactRateMaxExplore) return mean_rate_ebt_exact(plan, snr);
    return mean_rate_ebt_quadrature(plan, snr);
}

double mean_rate_conventional(ConvPlan plan, MeanSnr snr) {
    const double inv = 1.0 / snr.linear();
    return plan.width * exp_scaled_e1(inv) / std::numbers::ln2;
}

double mean_rate_ebt_approx(const EbtPlan& plan, MeanSnr snr) {
    require_approx_regime(plan);
    double sum = 0.0;
    for (int i = 1; i <= plan.keep; ++i)
        sum += std::log2(1.0 + snr.linear() * std::log(static_cast<double>(plan.explore) / i));
    return sum;
}

double mean_rate_ebt_lower_bound(const EbtPlan& plan, MeanSnr snr) {
    require_approx_regime(plan);
    return plan.keep *
           std::log2(1.0 + snr.linear() *
                               std::log(static_cast<double>(plan.explore) / plan.keep));
}

double equivalent_conventional_width(const EbtPlan& plan, int data_slots) {
    if (data_slots < 1) throw DomainError("data slot count must be >= 1");
    return (plan.explore + static_cast<double>(data_slots) * plan.keep) / (1.0 + data_slots);
}

}  // namespace ebt
