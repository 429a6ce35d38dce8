#pragma once

#include <cstddef>

namespace telegraph_kit::special {

/// Relative tolerance of the series evaluators.
inline constexpr double kSeriesTolerance = 1e-13;
/// Term cap for the Mittag-Leffler series.
inline constexpr std::size_t kMaxSeriesTerms = 10'000;

/// Parameters of the three-parameter Mittag-Leffler function
///   E^gamma_{nu,delta}(x) = sum_j Gamma(gamma+j) x^j / (Gamma(gamma) j! Gamma(nu j + delta)).
/// gamma == 0 is accepted and denotes the degenerate limit 1/Gamma(delta).
struct MLParams {
    double nu = 1.0;
    double delta = 1.0;
    double gamma = 1.0;
};

/// E^gamma_{nu,delta}(x). For nu == 1, delta >= gamma and x < 0 the value is
/// computed through the Kummer reflection
///   E^gamma_{1,delta}(x) = e^x E^{delta-gamma}_{1,delta}(-x),
/// which turns the alternating series into a positive one. Other negative
/// arguments fall back to compensated direct summation.
double mittag_leffler(const MLParams& params, double x, double tol = kSeriesTolerance);

/// Natural log of E^gamma_{nu,delta}(x). Stays finite where the value itself
/// would overflow or underflow (large x, large delta). Throws std::domain_error
/// when the function is not positive at x.
double log_mittag_leffler(const MLParams& params, double x, double tol = kSeriesTolerance);

/// Plain term-by-term summation (Neumaier compensated), no reflection.
/// Accurate only when the series does not cancel badly; exposed for checks.
double mittag_leffler_direct(const MLParams& params, double x, double tol = kSeriesTolerance);

struct ReflectionSides {
    double lhs;  ///< E^{g1}_{1,g1+g2}(z)
    double rhs;  ///< e^z E^{g2}_{1,g1+g2}(-z)
};

/// Both sides of E^{g1}_{1,g1+g2}(z) = e^z E^{g2}_{1,g1+g2}(-z), with z = y - x.
ReflectionSides reflection_identity(int gamma1, int gamma2, double y_minus_x);

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// Modified Bessel function of the first kind, order 0 or 1, x >= 0.
double bessel_i(int order, double x);

/// e^{-x} I_order(x); finite for every x >= 0.
double bessel_i_scaled(int order, double x);

/// e^{-x} I_1(x) / x, continuous at 0 with value 1/2.
double bessel_i1_over_x_scaled(double x);

}  // namespace telegraph_kit::special
