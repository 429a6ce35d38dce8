#pragma once

// Test-only reference evaluators, independent of the library code paths.

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using hp = boost::multiprecision::cpp_bin_float_100;

/// Direct Mittag-Leffler series E^gamma_{1,delta}(x) in ~100-digit arithmetic.
inline double mittag_leffler_hp(double gamma, double delta, double x, int max_terms = 5000) {
    const hp g(gamma);
    const hp d(delta);
    const hp z(x);
    hp term = 1 / boost::math::tgamma(d);
    if (gamma == 0.0) {
        return static_cast<double>(term);
    }
    hp sum = term;
    for (int j = 0; j < max_terms; ++j) {
        term *= (g + j) * z / ((j + 1) * (d + j));
        sum += term;
        if (j > 2 * std::abs(x) + 10 && abs(term) < hp("1e-80") * abs(sum)) {
            break;
        }
    }
    return static_cast<double>(sum);
}

/// log Gamma via upward recurrence to x >= 40 and the Stirling series.
inline double log_gamma_stirling(double x) {
    long double shift = 0.0L;
    long double y = x;
    while (y < 40.0L) {
        shift += std::log(y);
        y += 1.0L;
    }
    const long double inv = 1.0L / y;
    const long double inv2 = inv * inv;
    const long double series =
        inv * (1.0L / 12 - inv2 * (1.0L / 360 - inv2 * (1.0L / 1260 - inv2 * (1.0L / 1680 - inv2 / 1188))));
    const long double value = (y - 0.5L) * std::log(y) - y + 0.5L * std::log(2.0L * 3.14159265358979323846264338327950288L) + series;
    return static_cast<double>(value - shift);
}

/// Power series of I_order(x) with a fixed number of terms, in long double.
inline double bessel_series(int order, double x, int terms = 100) {
    const long double half = 0.5L * x;
    long double term = order == 0 ? 1.0L : half;
    long double sum = term;
    for (int k = 1; k < terms; ++k) {
        term *= half * half / (static_cast<long double>(k) * (k + order));
        sum += term;
    }
    return static_cast<double>(sum);
}

}  // namespace oracle
