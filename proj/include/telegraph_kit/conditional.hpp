#pragma once

#include "telegraph_kit/counting.hpp"
#include "telegraph_kit/mixed_law.hpp"
#include "telegraph_kit/params.hpp"

namespace telegraph_kit::conditional {

/// Observation of the motion at an earlier time s < t: T(s) = x.
struct Context {
    double s = 0.0;
    double t = 0.0;
    double x = 0.0;

    double remaining() const { return t - s; }
    /// Throws std::invalid_argument unless 0 < s < t and a2 s < x < a1 s.
    void validate(const ProcessParams& params) const;
};

/// Velocity after the k-th switch.
inline Velocity v_after_k(Velocity v0, long long k) { return after_switches(v0, k); }

/// Law of T(t) given T(s) = x, N(s) = k, V(0) = v0; valid for two rates.
/// Only the endpoints a2 s <= x <= a1 s are required here.
MixedLaw law_given_pos_count_vel(const ProcessParams& params, const Context& ctx, long long k, Velocity v0);

/// Correction added to the free density of T(t - s) when N(s) is even:
/// g(s, dt; x, u) with u = y - x. Requires lambda1 == lambda2.
double g_term(const ProcessParams& params, double s, double dt, double x, double u);

/// Same quantity written as e^{-lambda dt} ((a1 + a2) s - 2x) / (2 (a1 - a2) s) times
/// the u-derivative of I_0(2 lambda R(u) / (a1 - a2)).
double g_term_derivative_form(const ProcessParams& params, double s, double dt, double x, double u);

/// Law of T(t) given T(s) = x and the parity of N(s). The odd branch holds for
/// two rates when V(0) follows the stationary law (a fair coin if the rates
/// agree); the even branch throws ScopeError unless lambda1 == lambda2.
MixedLaw law_given_pos_parity(const ProcessParams& params, const Context& ctx, counting::Parity parity);

/// P{N(s) even | T(s) = x}. Requires lambda1 == lambda2.
double parity_posterior(const ProcessParams& params, double s, double x);

/// Law of T(t) given only T(s) = x. Requires lambda1 == lambda2.
MixedLaw law_given_pos(const ProcessParams& params, const Context& ctx);

/// Continuous part of law_given_pos at y, as a function of (t, y) for fixed (s, x).
double density_given_pos(const ProcessParams& params, double s, double x, double t, double y);

}  // namespace telegraph_kit::conditional
