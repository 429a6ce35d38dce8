#include "telegraph_kit/special_functions.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "telegraph_kit/errors.hpp"

namespace telegraph_kit::special {
namespace {

constexpr double kRescaleThreshold = 1e250;
constexpr double kAsymptoticBesselFrom = 25.0;

void validate(const MLParams& p) {
    if (!(p.nu > 0.0) || !(p.delta > 0.0) || !(p.gamma >= 0.0)) {
        std::ostringstream os;
        os << "invalid Mittag-Leffler parameters nu=" << p.nu << " delta=" << p.delta
           << " gamma=" << p.gamma;
        throw std::invalid_argument(os.str());
    }
}

// Ratio term_{j+1} / term_j of the Mittag-Leffler series, without the factor x.
double term_ratio(const MLParams& p, std::size_t j) {
    const double jd = static_cast<double>(j);
    if (p.nu == 1.0) {
        return (p.gamma + jd) / ((jd + 1.0) * (jd + p.delta));
    }
    return (p.gamma + jd) / (jd + 1.0) *
           std::exp(std::lgamma(p.nu * jd + p.delta) - std::lgamma(p.nu * (jd + 1.0) + p.delta));
}

// log of the positive series sum_j r_j x^j with r_0 = 1, for x >= 0.
// The caller adds -lgamma(delta).
double log_scaled_positive_series(const MLParams& p, double x, double tol) {
    if (x == 0.0) {
        return 0.0;
    }
    double sum = 1.0;
    double term = 1.0;
    double log_scale = 0.0;
    for (std::size_t j = 0; j < kMaxSeriesTerms; ++j) {
        const double ratio = term_ratio(p, j) * x;
        term *= ratio;
        sum += term;
        if (sum > kRescaleThreshold) {
            sum /= kRescaleThreshold;
            term /= kRescaleThreshold;
            log_scale += std::log(kRescaleThreshold);
        }
        const double next = term_ratio(p, j + 1) * x;
        if (next < 1.0 && term * next / (1.0 - next) <= tol * sum) {
            return log_scale + std::log(sum);
        }
        if (term == 0.0) {
            return log_scale + std::log(sum);
        }
    }
    throw EvaluationError("Mittag-Leffler series did not converge", std::exp(log_scale) * sum,
                          kMaxSeriesTerms);
}

bool reflectable(const MLParams& p) { return p.nu == 1.0 && p.delta >= p.gamma; }

double bessel_series_scaled(int order, double x) {
    const double half = 0.5 * x;
    const double q = half * half;
    double term = order == 0 ? 1.0 : half;
    double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(k + order));
        sum += term;
        if (term < 1e-17 * sum) {
            break;
        }
    }
    return sum * std::exp(-x);
}

// Hankel expansion of e^{-x} I_nu(x); used for x >= kAsymptoticBesselFrom.
double bessel_asymptotic_scaled(int order, double x) {
    const double mu = 4.0 * order * order;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = term * (odd * odd - mu) / (8.0 * k * x);
        if (std::abs(next) >= std::abs(term)) {
            break;
        }
        term = next;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) {
            break;
        }
    }
    return sum / std::sqrt(2.0 * M_PI * x);
}

void check_bessel_args(int order, double x) {
    if (order != 0 && order != 1) {
        throw std::invalid_argument("bessel_i: only orders 0 and 1 are supported");
    }
    if (!(x >= 0.0)) {
        throw std::invalid_argument("bessel_i: argument must be non-negative");
    }
}

}  // namespace

double log_mittag_leffler(const MLParams& params, double x, double tol) {
    validate(params);
    if (params.gamma == 0.0) {
        return -std::lgamma(params.delta);
    }
    if (x >= 0.0) {
        return -std::lgamma(params.delta) + log_scaled_positive_series(params, x, tol);
    }
    if (reflectable(params)) {
        const MLParams mirrored{1.0, params.delta, params.delta - params.gamma};
        return x + log_mittag_leffler(mirrored, -x, tol);
    }
    const double value = mittag_leffler_direct(params, x, tol);
    if (!(value > 0.0)) {
        throw std::domain_error("log_mittag_leffler: function is not positive at this argument");
    }
    return std::log(value);
}

double mittag_leffler(const MLParams& params, double x, double tol) {
    validate(params);
    if (x >= 0.0 || reflectable(params) || params.gamma == 0.0) {
        return std::exp(log_mittag_leffler(params, x, tol));
    }
    return mittag_leffler_direct(params, x, tol);
}

double mittag_leffler_direct(const MLParams& params, double x, double tol) {
    validate(params);
    const double first = std::exp(-std::lgamma(params.delta));
    if (params.gamma == 0.0 || x == 0.0) {
        return first;
    }
    // Neumaier summation of signed terms.
    double sum = first;
    double compensation = 0.0;
    double term = first;
    for (std::size_t j = 0; j < kMaxSeriesTerms; ++j) {
        term *= term_ratio(params, j) * x;
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term)) {
            compensation += (sum - t) + term;
        } else {
            compensation += (term - t) + sum;
        }
        sum = t;
        const double next = std::abs(term_ratio(params, j + 1) * x);
        const double total = std::abs(sum + compensation);
        if (next < 1.0 && std::abs(term) * next / (1.0 - next) <= tol * total) {
            return sum + compensation;
        }
        if (!std::isfinite(sum)) {
            break;
        }
    }
    throw EvaluationError("Mittag-Leffler direct series did not converge", sum + compensation,
                          kMaxSeriesTerms);
}

ReflectionSides reflection_identity(int gamma1, int gamma2, double y_minus_x) {
    if (gamma1 < 1 || gamma2 < 1) {
        throw std::invalid_argument("reflection_identity: gamma1, gamma2 must be >= 1");
    }
    const double delta = static_cast<double>(gamma1 + gamma2);
    const double z = y_minus_x;
    const double lhs = mittag_leffler({1.0, delta, static_cast<double>(gamma1)}, z);
    const double rhs =
        std::exp(z + log_mittag_leffler({1.0, delta, static_cast<double>(gamma2)}, -z));
    return {lhs, rhs};
}

double log_gamma(double x) {
    if (!(x > 0.0)) {
        throw std::invalid_argument("log_gamma: argument must be positive");
    }
    return std::lgamma(x);
}

double bessel_i_scaled(int order, double x) {
    check_bessel_args(order, x);
    if (x < kAsymptoticBesselFrom) {
        return bessel_series_scaled(order, x);
    }
    return bessel_asymptotic_scaled(order, x);
}

double bessel_i(int order, double x) {
    check_bessel_args(order, x);
    if (x < kAsymptoticBesselFrom) {
        const double half = 0.5 * x;
        const double q = half * half;
        double term = order == 0 ? 1.0 : half;
        double sum = term;
        for (int k = 1; k < 500; ++k) {
            term *= q / (static_cast<double>(k) * static_cast<double>(k + order));
            sum += term;
            if (term < 1e-17 * sum) {
                break;
            }
        }
        return sum;
    }
    return bessel_asymptotic_scaled(order, x) * std::exp(x);
}

double bessel_i1_over_x_scaled(double x) {
    if (!(x >= 0.0)) {
        throw std::invalid_argument("bessel_i1_over_x_scaled: argument must be non-negative");
    }
    if (x < kAsymptoticBesselFrom) {
        const double q = 0.25 * x * x;
        double term = 0.5;
        double sum = term;
        for (int k = 1; k < 500; ++k) {
            term *= q / (static_cast<double>(k) * static_cast<double>(k + 1));
            sum += term;
            if (term < 1e-17 * sum) {
                break;
            }
        }
        return sum * std::exp(-x);
    }
    return bessel_asymptotic_scaled(1, x) / x;
}

}  // namespace telegraph_kit::special
