#pragma once

// Globally adaptive 7/15-point Gauss-Kronrod quadrature on a finite interval.

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace ebt::detail {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
    int intervals = 0;
};

struct Segment {
    double lo;
    double hi;
    double value;
    double error;

    bool operator<(const Segment& other) const { return error < other.error; }
};

template <typename F>
Segment gauss_kronrod_15(F&& f, double lo, double hi) {
    static constexpr std::array<double, 8> kNodes = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr std::array<double, 8> kKronrod = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr std::array<double, 4> kGauss = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double kronrod = fc * kKronrod[7];
    double gauss = fc * kGauss[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kNodes[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kKronrod[j] * pair;
        if (j % 2 == 1) gauss += kGauss[j / 2] * pair;
    }
    return {lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
}

// Integrates f over the union of [breaks[i], breaks[i+1]].
template <typename F>
QuadratureResult integrate_adaptive(F&& f, const std::vector<double>& breaks, double rel_tol,
                                    double abs_tol, int max_intervals = 4000) {
    std::priority_queue<Segment> heap;
    double value = 0.0;
    double error = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        Segment s = gauss_kronrod_15(f, breaks[i], breaks[i + 1]);
        value += s.value;
        error += s.error;
        heap.push(s);
    }
    int count = static_cast<int>(heap.size());
    while (error > std::max(abs_tol, rel_tol * std::abs(value)) && count < max_intervals) {
        const Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        const Segment left = gauss_kronrod_15(f, worst.lo, mid);
        const Segment right = gauss_kronrod_15(f, mid, worst.hi);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    // Re-sum to shed the drift of the running updates.
    double total = 0.0;
    double total_error = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        total_error += heap.top().error;
        heap.pop();
    }
    return {total, total_error, total_error <= std::max(abs_tol, rel_tol * std::abs(total)),
            count};
}

}  // namespace ebt::detail
