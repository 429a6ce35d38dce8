#pragma once

#include <string>
#include <vector>

#include "telegraph_kit/params.hpp"

namespace telegraph_kit::extremes {

/// Switch counts above this are rejected with CapabilityError.
inline constexpr int kMaxSwitches = 10;
/// Two distinct rates have no closed-form first term; the nested quadrature
/// that replaces it is capped here.
inline constexpr int kMaxSwitchesTwoRates = 5;

enum class Order { max_first, min_first, either };

/// Joint law of (T(t), m(t), M(t)) for the motion with velocities +-c that
/// starts upward with exactly n switches in [0, t]. Levels are -alpha and beta.
struct Query {
    double c = 1.0;
    double t = 1.0;
    int n = 2;
    double alpha = 0.0;
    double beta = 0.0;
    double x = 0.0;
    Order order = Order::either;
    /// lambda1 while moving at +c, lambda2 at -c.
    RatePair rates{1.0, 1.0};

    /// Throws std::invalid_argument unless c, t > 0, n >= 0 and alpha, beta in [0, ct).
    void validate() const;
    ProcessParams process() const { return {c, -c, rates}; }
};

struct SupportClass {
    bool in_SM = false;
    bool in_Sm = false;
    /// 1..3 for the satisfied branch, 0 if none.
    int branch_M = 0;
    int branch_m = 0;
    /// Human readable list of inequalities holding with equality.
    std::vector<std::string> tight;
};

/// Membership in the supports of the max-first (n >= 2) and min-first
/// (n >= 3) laws, decided by the three-branch inequality systems.
SupportClass classify_support(const Query& q);

/// Contribution of paths whose first displacement already crosses beta.
/// Closed form for equal rates, nested quadrature otherwise.
double first_term_density(const Query& q);
/// The same contribution by quadrature of the single-barrier law, any rates.
double first_term_quadrature(const Query& q);

/// Density at y of {T(tau) in dy, m(tau) < -a} given V(0) = v0 and N(tau) = m,
/// for the motion with velocities +-c and the given rates (m >= 1).
double single_barrier_density(const ProcessParams& params, double tau, int m, Velocity v0, double a, double y);

/// P{T(t) in dx, m < -alpha, M > beta, F_{-alpha} > F_beta | V(0) = c, N(t) = n} / dx.
double max_then_min_density(const Query& q);

/// Closed form valid when (ct - 4 alpha - 2 beta - x) / (2c) <= 0 <= beta / c.
/// Throws std::invalid_argument outside that regime.
double reflection_closed_form(const Query& q);
bool in_reflection_regime(const Query& q);

/// P{T(t) in dx, m < -alpha, M > beta, F_{-alpha} < F_beta | V(0) = c, N(t) = n} / dx.
double min_then_max_density(const Query& q);
/// Upper limit of the first-switch integral for the min-first law.
double min_then_max_upper_limit(const Query& q);

/// Sum of the two orderings.
double joint_both_levels_density(const Query& q);

/// Dispatches on q.order.
double density(const Query& q);

}  // namespace telegraph_kit::extremes
