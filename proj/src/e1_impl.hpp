#pragma once

// Precision-generic evaluation of e^x E1(x). Instantiated for double by specfun.cpp
// and for 113-bit floats by the closed-form rate.

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <limits>

namespace ebt::detail {

// Below this argument the power series is used, above it the continued fraction.
inline constexpr double kE1SeriesCutoff = 1.5;

template <typename Real>
Real e1_series(const Real& x) {
    using std::abs;
    using std::log;
    const Real eps = std::numeric_limits<Real>::epsilon();
    // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    Real sum = 0;
    Real power = 1;  // (-x)^k / k!
    for (int k = 1; k < 1000; ++k) {
        power *= -x / k;
        const Real term = power / k;
        sum += term;
        if (abs(term) <= eps * abs(sum)) break;
    }
    return -boost::math::constants::euler<Real>() - log(x) - sum;
}

// Modified Lentz evaluation of e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...))).
template <typename Real>
Real e1_scaled_continued_fraction(const Real& x) {
    using std::abs;
    const Real eps = std::numeric_limits<Real>::epsilon();
    const Real tiny = std::numeric_limits<Real>::min() / eps;
    Real b = x + 1;
    Real c = 1 / tiny;
    Real d = 1 / b;
    Real h = d;
    for (int i = 1; i < 100000; ++i) {
        const Real an = -Real(i) * Real(i);
        b += 2;
        d = an * d + b;
        if (abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (abs(c) < tiny) c = tiny;
        d = 1 / d;
        const Real delta = c * d;
        h *= delta;
        if (abs(delta - 1) <= eps) break;
    }
    return h;
}

template <typename Real>
Real exp_scaled_e1(const Real& x) {
    using std::exp;
    if (x < Real(kE1SeriesCutoff)) return exp(x) * e1_series(x);
    return e1_scaled_continued_fraction(x);
}

}  // namespace ebt::detail
