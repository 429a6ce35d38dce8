#include "telegraph_kit/extremes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "telegraph_kit/counting.hpp"
#include "telegraph_kit/errors.hpp"
#include "telegraph_kit/quadrature.hpp"
#include "telegraph_kit/telegraph.hpp"

namespace telegraph_kit::extremes {

namespace {

constexpr quadrature::Options kOuter{1e-7, 0.0, 20'000};
constexpr quadrature::Options kInner{1e-8, 0.0, 20'000};

struct Levels {
    double c, t, alpha, beta, x;
};

// Closed interval check with the ends chosen per flag.
bool within(double v, double lo, bool lo_closed, double hi, bool hi_closed) {
    const bool above = lo_closed ? v >= lo : v > lo;
    const bool below = hi_closed ? v <= hi : v < hi;
    return above && below;
}

struct Branch {
    double b_lo, b_hi;
    bool b_hi_closed;
    double a_lo, a_hi;
    double x_lo, x_hi;
};

// Each branch: beta in [b_lo, b_hi), -alpha in (a_lo, a_hi], x in [x_lo, x_hi].
int first_branch(const std::array<Branch, 3>& branches, double beta, double alpha, double x) {
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const Branch& b = branches[i];
        if (within(beta, b.b_lo, true, b.b_hi, b.b_hi_closed) && within(-alpha, b.a_lo, false, b.a_hi, true) &&
            within(x, b.x_lo, true, b.x_hi, true)) {
            return static_cast<int>(i) + 1;
        }
    }
    return 0;
}

std::array<Branch, 3> branches_M(const Levels& l) {
    const double ct = l.c * l.t;
    const double b = l.beta, a = l.alpha;
    return {{{0.0, ct / 3.0, false, (3.0 * b - ct) / 2.0, 0.0, -a, b},
             {0.0, ct / 3.0, false, 2.0 * b - ct, (3.0 * b - ct) / 2.0, -a, ct - 2.0 * a - 2.0 * b},
             {ct / 3.0, ct / 2.0, false, 2.0 * b - ct, 0.0, -a, ct - 2.0 * a - 2.0 * b}}};
}

std::array<Branch, 3> branches_m(const Levels& l) {
    const double ct = l.c * l.t;
    const double b = l.beta, a = l.alpha;
    return {{{0.0, ct / 2.0, false, (2.0 * b - ct) / 3.0, 0.0, -a, b},
             {0.0, ct / 2.0, false, (b - ct) / 2.0, (2.0 * b - ct) / 3.0, 2.0 * a + 2.0 * b - ct, b},
             {ct / 2.0, ct, false, (b - ct) / 2.0, 0.0, 2.0 * a + 2.0 * b - ct, b}}};
}

bool in_SM(const Levels& l, int n) { return n >= 2 && first_branch(branches_M(l), l.beta, l.alpha, l.x) != 0; }
bool in_Sm(const Levels& l, int n) { return n >= 3 && first_branch(branches_m(l), l.beta, l.alpha, l.x) != 0; }

double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

// (2k)!/((k-1)! k!) A^{k-1} B^k / (2ct)^{2k} and the odd analogue, with A = ct + 2 alpha + shift + x.
double explicit_term(const Levels& l, int n, double shift) {
    const double ct = l.c * l.t;
    const double a = ct + 2.0 * l.alpha + shift + l.x;
    const double b = ct - 2.0 * l.alpha - 2.0 * l.beta - l.x;
    if (!(b > 0.0) || a < 0.0) {
        return 0.0;
    }
    const int k = n / 2;
    const int upper_power = n % 2 == 0 ? k : k + 1;
    const double log_coeff = log_factorial(n) - log_factorial(k - 1) - log_factorial(upper_power);
    const double log_powers = (k - 1 == 0 ? 0.0 : (k - 1) * std::log(a)) + upper_power * std::log(b) -
                              n * std::log(2.0 * ct);
    if (k - 1 > 0 && a == 0.0) {
        return 0.0;
    }
    return std::exp(log_coeff + log_powers);
}

double free_density(const ProcessParams& p, double tau, int m, Velocity v, double y) {
    return telegraph::density_given_n_v(p, tau, m, v, y);
}

double barrier_below(const ProcessParams& p, double tau, int m, Velocity v, double a, double y,
                     const quadrature::Options& opts) {
    const double c = p.a1;
    if (m < 1 || !(tau > 0.0) || !(y > -c * tau && y < c * tau)) {
        return 0.0;
    }
    if (a < 0.0 || y < -a) {
        // The level is already below the start, or the endpoint itself lies under it.
        return free_density(p, tau, m, v, y);
    }
    const RatePair r = p.rates_from(v);
    auto first = [&](double s) { return counting::first_arrival_density(r, tau, m, s); };
    if (v == Velocity::lower) {
        if (m == 1) {
            const double s = (c * tau - y) / (2.0 * c);
            return (s > a / c && s < tau) ? first(s) / (2.0 * c) : 0.0;
        }
        const double reach = std::min(tau, (c * tau - y) / (2.0 * c));
        const double crossed =
            quadrature::integrate(
                [&](double s) { return first(s) * free_density(p, tau - s, m - 1, Velocity::upper, y + c * s); },
                a / c, reach, opts)
                .value;
        const double pending = quadrature::integrate(
                                   [&](double s) {
                                       return first(s) * barrier_below(p, tau - s, m - 1, Velocity::upper, a - c * s,
                                                                       y + c * s, opts);
                                   },
                                   0.0, std::min(a / c, reach), opts)
                                   .value;
        return crossed + pending;
    }
    if (m == 1) {
        // Up then straight down: the minimum is the endpoint, which is above -a here.
        return 0.0;
    }
    const double reach = std::min(tau, (y + c * tau) / (2.0 * c));
    return quadrature::integrate(
               [&](double s) {
                   return first(s) * barrier_below(p, tau - s, m - 1, Velocity::lower, a + c * s, y - c * s, opts);
               },
               0.0, reach, opts)
        .value;
}

double first_term_by_quadrature(const ProcessParams& p, const Levels& l, int n, const quadrature::Options& opts) {
    const double c = l.c;
    const double lo = l.beta / c;
    const double hi = std::min(l.t, (c * l.t - 2.0 * l.alpha - l.x) / (2.0 * c));
    return quadrature::integrate(
               [&](double t1) {
                   return counting::first_arrival_density(p.rates, l.t, n, t1) *
                          barrier_below(p, l.t - t1, n - 1, Velocity::lower, l.alpha + c * t1, l.x - c * t1, kInner);
               },
               lo, hi, opts)
        .value;
}

double first_term(const ProcessParams& p, const Levels& l, int n, const quadrature::Options& opts) {
    if (p.equal_rates()) {
        return explicit_term(l, n, 0.0);
    }
    return first_term_by_quadrature(p, l, n, opts);
}

double max_then_min(const ProcessParams& p, const Levels& l, int n, const quadrature::Options& opts) {
    if (!in_SM(l, n)) {
        return 0.0;
    }
    const double first = first_term(p, l, n, opts);
    if (n < 4) {
        return first;
    }
    const double c = l.c, t = l.t;
    const double slack = (c * t - 2.0 * l.alpha - 2.0 * l.beta - l.x) / (2.0 * c);
    auto inner = [&](double t1) {
        const double upper = std::min({(2.0 * c * t1 + l.alpha) / c, slack + t1, t});
        return quadrature::integrate(
                   [&](double t2) {
                       const double shift = c * t2 - 2.0 * c * t1;
                       const Levels sub{c, t - t2, l.alpha - shift, l.beta + shift, l.x + shift};
                       const double kernel = counting::arrival_pair_density(p.rates, t, n, 1, 2, t1, t2);
                       return kernel == 0.0 ? 0.0 : kernel * max_then_min(p, sub, n - 2, kInner);
                   },
                   t1, upper, kInner)
            .value;
    };
    const double split = (c * t - 4.0 * l.alpha - 2.0 * l.beta - l.x) / (2.0 * c);
    const std::array<double, 1> cuts{split};
    return first + quadrature::integrate_pieces(inner, 0.0, l.beta / c, cuts, opts).value;
}

void check_depth(const Query& q) {
    if (q.n > kMaxSwitches) {
        throw CapabilityError("joint extremes recursion is capped at n = " + std::to_string(kMaxSwitches) +
                              "; use the Monte Carlo estimator instead");
    }
    if (!q.rates.equal() && q.n > kMaxSwitchesTwoRates) {
        throw CapabilityError("joint extremes with two rates are capped at n = " +
                              std::to_string(kMaxSwitchesTwoRates) + "; use the Monte Carlo estimator instead");
    }
}

Levels levels_of(const Query& q) { return {q.c, q.t, q.alpha, q.beta, q.x}; }

}  // namespace

void Query::validate() const {
    if (!(c > 0.0) || !(t > 0.0)) {
        throw std::invalid_argument("extremes query needs c > 0 and t > 0");
    }
    if (n < 0) {
        throw std::invalid_argument("switch count must be nonnegative");
    }
    if (!(alpha >= 0.0 && alpha < c * t) || !(beta >= 0.0 && beta < c * t)) {
        throw std::invalid_argument("levels must satisfy 0 <= alpha, beta < ct");
    }
    rates.validate();
}

SupportClass classify_support(const Query& q) {
    q.validate();
    const Levels l = levels_of(q);
    SupportClass out;
    out.branch_M = q.n >= 2 ? first_branch(branches_M(l), q.beta, q.alpha, q.x) : 0;
    out.branch_m = q.n >= 3 ? first_branch(branches_m(l), q.beta, q.alpha, q.x) : 0;
    out.in_SM = out.branch_M != 0;
    out.in_Sm = out.branch_m != 0;
    const double eps = 1e-12 * q.c * q.t;
    auto report = [&](const char* set, int index, const Branch& b) {
        const std::string tag = std::string(set) + " branch " + std::to_string(index) + ": ";
        auto tight = [&](double v, double bound, const char* what) {
            if (std::abs(v - bound) <= eps) {
                out.tight.push_back(tag + what);
            }
        };
        tight(q.beta, b.b_lo, "beta at lower end");
        tight(q.beta, b.b_hi, "beta at upper end");
        tight(-q.alpha, b.a_lo, "-alpha at lower end");
        tight(-q.alpha, b.a_hi, "-alpha at upper end");
        tight(q.x, b.x_lo, "x at lower end");
        tight(q.x, b.x_hi, "x at upper end");
    };
    const auto bm = branches_M(l);
    const auto bn = branches_m(l);
    for (int i = 0; i < 3; ++i) {
        report("S_M", i + 1, bm[i]);
        report("S_m", i + 1, bn[i]);
    }
    return out;
}

double first_term_density(const Query& q) {
    q.validate();
    check_depth(q);
    if (q.n < 2 || !in_SM(levels_of(q), q.n)) {
        return 0.0;
    }
    return first_term(q.process(), levels_of(q), q.n, kOuter);
}

double first_term_quadrature(const Query& q) {
    q.validate();
    if (q.n < 2 || !in_SM(levels_of(q), q.n)) {
        return 0.0;
    }
    return first_term_by_quadrature(q.process(), levels_of(q), q.n, kOuter);
}

double single_barrier_density(const ProcessParams& params, double tau, int m, Velocity v0, double a, double y) {
    params.validate();
    if (params.a1 != -params.a2) {
        throw std::invalid_argument("single-barrier law needs symmetric velocities");
    }
    return barrier_below(params, tau, m, v0, a, y, kOuter);
}

double max_then_min_density(const Query& q) {
    q.validate();
    check_depth(q);
    return max_then_min(q.process(), levels_of(q), q.n, kOuter);
}

bool in_reflection_regime(const Query& q) {
    return (q.c * q.t - 4.0 * q.alpha - 2.0 * q.beta - q.x) / (2.0 * q.c) <= 0.0 && q.beta >= 0.0;
}

double reflection_closed_form(const Query& q) {
    q.validate();
    if (!q.rates.equal()) {
        throw ScopeError("the reflection closed form is stated for equal rates");
    }
    if (!in_reflection_regime(q)) {
        throw std::invalid_argument("query is outside the reflection regime");
    }
    if (q.n < 2 || !in_SM(levels_of(q), q.n)) {
        return 0.0;
    }
    return explicit_term(levels_of(q), q.n, 2.0 * q.beta);
}

double min_then_max_upper_limit(const Query& q) {
    q.validate();
    return std::min(q.beta / q.c, (q.c * q.t - 2.0 * q.alpha - 2.0 * q.beta + q.x) / (2.0 * q.c));
}

double min_then_max_density(const Query& q) {
    q.validate();
    check_depth(q);
    const Levels l = levels_of(q);
    if (!in_Sm(l, q.n)) {
        return 0.0;
    }
    const ProcessParams p = q.process();
    // After the first switch the motion heads down; mirrored, it starts upward with the other rate.
    const ProcessParams mirrored{q.c, -q.c, q.rates.swapped()};
    const double c = q.c;
    return quadrature::integrate(
               [&](double t1) {
                   const Levels sub{c, q.t - t1, q.beta - c * t1, q.alpha + c * t1, c * t1 - q.x};
                   return counting::first_arrival_density(p.rates, q.t, q.n, t1) *
                          max_then_min(mirrored, sub, q.n - 1, kInner);
               },
               0.0, min_then_max_upper_limit(q), kOuter)
        .value;
}

double joint_both_levels_density(const Query& q) { return max_then_min_density(q) + min_then_max_density(q); }

double density(const Query& q) {
    switch (q.order) {
        case Order::max_first:
            return max_then_min_density(q);
        case Order::min_first:
            return min_then_max_density(q);
        case Order::either:
            break;
    }
    return joint_both_levels_density(q);
}

}  // namespace telegraph_kit::extremes
