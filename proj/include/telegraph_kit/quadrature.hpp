#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace telegraph_kit::quadrature {

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    std::size_t max_intervals = 100'000;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    std::size_t intervals = 0;
    bool converged = true;
};

namespace detail {

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

// 7-point Gauss / 15-point Kronrod pair on [a, b].
template <class F>
Panel gauss_kronrod_15(F& f, double a, double b) {
    using kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
    using gauss = boost::math::quadrature::gauss<double, 7>;
    const auto& nodes = kronrod::abscissa();
    const auto& kw = kronrod::weights();
    const auto& gw = gauss::weights();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double centre = f(mid);
    double k_sum = kw[0] * centre;
    double g_sum = gw[0] * centre;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double dx = half * nodes[i];
        const double pair = f(mid - dx) + f(mid + dx);
        k_sum += kw[i] * pair;
        if (i % 2 == 0) {
            g_sum += gw[i / 2] * pair;
        }
    }
    return {a, b, k_sum * half, std::abs((k_sum - g_sum) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over [a, b]: the panel
/// with the largest error estimate is bisected until the summed error is
/// below max(abs_tol, rel_tol * |value|) or max_intervals is reached.
template <class F>
Result integrate(F&& f, double a, double b, const Options& options = {}) {
    if (!(b > a)) {
        return {0.0, 0.0, 0, true};
    }
    std::priority_queue<detail::Panel> panels;
    panels.push(detail::gauss_kronrod_15(f, a, b));
    double value = panels.top().value;
    double error = panels.top().error;
    std::size_t count = 1;
    auto done = [&] { return error <= std::max(options.abs_tol, options.rel_tol * std::abs(value)); };
    while (!done()) {
        if (count >= options.max_intervals) {
            return {value, error, count, false};
        }
        const detail::Panel worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Panel is at machine resolution; no further refinement possible.
            return {value, error, count, false};
        }
        panels.pop();
        const detail::Panel left = detail::gauss_kronrod_15(f, worst.a, mid);
        const detail::Panel right = detail::gauss_kronrod_15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++count;
    }
    // Re-sum to shed the drift of the running updates.
    double total = 0.0;
    double total_error = 0.0;
    while (!panels.empty()) {
        total += panels.top().value;
        total_error += panels.top().error;
        panels.pop();
    }
    return {total, total_error, count, true};
}

/// Integrates over [a, b] split at the given interior breakpoints; the
/// absolute tolerance is shared evenly between the pieces.
template <class F>
Result integrate_pieces(F&& f, double a, double b, std::span<const double> breakpoints,
                        const Options& options = {}) {
    std::vector<double> cuts{a};
    for (double p : breakpoints) {
        if (p > a && p < b) {
            cuts.push_back(p);
        }
    }
    std::sort(cuts.begin() + 1, cuts.end());
    cuts.push_back(b);
    Options piece = options;
    piece.abs_tol = options.abs_tol / static_cast<double>(cuts.size() - 1);
    Result total;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const Result r = integrate(f, cuts[i], cuts[i + 1], piece);
        total.value += r.value;
        total.error += r.error;
        total.intervals += r.intervals;
        total.converged = total.converged && r.converged;
    }
    return total;
}

}  // namespace telegraph_kit::quadrature
