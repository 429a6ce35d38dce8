#include <cmath>
#include <gtest/gtest.h>

#include "telegraph_kit/conditional.hpp"
#include "telegraph_kit/errors.hpp"
#include "telegraph_kit/montecarlo.hpp"
#include "telegraph_kit/telegraph.hpp"

using namespace telegraph_kit;
using namespace telegraph_kit::conditional;
using counting::Parity;

namespace {

const ProcessParams kTwoRates{1.0, -1.0, {2.0, 1.0}};
const ProcessParams kAsym{1.5, -0.5, {1.2, 1.2}};
const ProcessParams kSym{1.0, -1.0, {0.8, 0.8}};

// Renewal at the first switch: density of T(dt) at u given V(0) = v.
double first_switch_renewal(const ProcessParams& p, double dt, Velocity v, double u) {
    const Velocity w = other(v);
    const double lv = p.rate(v), lw = p.rate(w);
    const double sv = p.speed(v), sw = p.speed(w);
    const double reach = std::abs(sw * dt - u) / p.spread();
    const double continuous =
        quadrature::integrate(
            [&](double t1) {
                return lv * std::exp(-lv * t1) * telegraph::density_given_v(p, dt - t1, w, u - sv * t1);
            },
            0.0, reach, {1e-13, 1e-12, 100000})
            .value;
    const double t_star = (u - sw * dt) / (sv - sw);
    const double single = lv * std::exp(-lv * t_star - lw * (dt - t_star)) / std::abs(sv - sw);
    return continuous + single;
}

// P{N(s) even | T(s) = x} as a ratio of switch-count mixtures.
double parity_series_ratio(const ProcessParams& p, double s, double x) {
    const auto table = counting::pmf_table(p.rates, s);
    double even = 0.0, total = 0.0;
    for (std::size_t n = 1; n < table.size(); ++n) {
        const double f = 0.5 * (telegraph::density_given_n_v(p, s, int(n), Velocity::upper, x) +
                                telegraph::density_given_n_v(p, s, int(n), Velocity::lower, x));
        total += table[n] * f;
        if (n % 2 == 0) even += table[n] * f;
    }
    return even / total;
}

}  // namespace

TEST(VelocityAfterK, Examples) {
    EXPECT_EQ(v_after_k(Velocity::upper, 0), Velocity::upper);
    EXPECT_EQ(v_after_k(Velocity::upper, 1), Velocity::lower);
    EXPECT_EQ(v_after_k(Velocity::lower, 4), Velocity::lower);
}

// =============================================================================
// Count and velocity known
// =============================================================================

TEST(LawGivenCountVelocity, ZeroSwitchesIsShiftedRestart) {
    const Context ctx{0.5, 1.3, 0.2};
    const MixedLaw law = law_given_pos_count_vel(kTwoRates, ctx, 0, Velocity::lower);
    for (double u : {-0.6, 0.1, 0.7}) {
        EXPECT_NEAR(law.density(0.2 + u), telegraph::density_given_v(kTwoRates, 0.8, Velocity::lower, u), 1e-13);
    }
    ASSERT_EQ(law.atoms().size(), 1u);
    EXPECT_DOUBLE_EQ(law.atoms()[0].location, 0.2 - 0.8);
    EXPECT_DOUBLE_EQ(law.atoms()[0].mass, std::exp(-0.8));
}

TEST(LawGivenCountVelocity, Normalised) {
    for (long long k : {0, 1, 2, 5}) {
        for (Velocity v0 : {Velocity::upper, Velocity::lower}) {
            const MixedLaw law = law_given_pos_count_vel(kTwoRates, {0.5, 1.0, 0.1}, k, v0);
            EXPECT_NEAR(law.total_mass(), 1.0, 1e-8);
        }
    }
}

TEST(LawGivenCountVelocity, FirstSwitchRenewalIdentity) {
    const Context ctx{0.5, 1.0, 0.1};
    for (const ProcessParams& p : {kTwoRates, kAsym}) {
        for (long long k : {1, 2}) {
            const MixedLaw law = law_given_pos_count_vel(p, ctx, k, Velocity::upper);
            const Velocity vk = v_after_k(Velocity::upper, k);
            for (double y : {-0.25, 0.0, 0.3, 0.55}) {
                if (!(y > law.lower() && y < law.upper())) continue;
                EXPECT_NEAR(law.density(y), first_switch_renewal(p, ctx.remaining(), vk, y - ctx.x), 1e-7) << y;
            }
        }
    }
}

// =============================================================================
// Correction term
// =============================================================================

TEST(GTerm, VanishesAtMidpoint) {
    const double s = 0.7, dt = 0.4;
    const double x = (kAsym.a1 + kAsym.a2) * s / 2.0;
    for (double u : {-0.15, 0.0, 0.2, 0.55}) {
        EXPECT_EQ(g_term(kAsym, s, dt, x, u), 0.0);
    }
}

TEST(GTerm, IntegratesToZero) {
    for (double x : {-0.2, 0.1, 0.6}) {
        const double s = 0.7, dt = 0.5;
        const auto r = quadrature::integrate([&](double u) { return g_term(kAsym, s, dt, x, u); },
                                             kAsym.a2 * dt, kAsym.a1 * dt);
        EXPECT_NEAR(r.value, 0.0, 1e-9);
    }
}

TEST(GTerm, DerivativeFormMatchesFiniteDifference) {
    const double s = 0.7, dt = 0.5, x = 0.6;
    const double lambda = kAsym.rates.lambda1, w = kAsym.spread();
    auto i0_of = [&](double u) {
        return std::cyl_bessel_i(0.0, 2.0 * lambda / w * std::sqrt((kAsym.a1 * dt - u) * (u - kAsym.a2 * dt)));
    };
    for (double u : {-0.2, 0.05, 0.3, 0.6}) {
        const double h = 1e-5;
        const double derivative = (i0_of(u + h) - i0_of(u - h)) / (2.0 * h);
        const double expected =
            std::exp(-lambda * dt) * ((kAsym.a1 + kAsym.a2) * s - 2.0 * x) / (2.0 * w * s) * derivative;
        EXPECT_NEAR(g_term_derivative_form(kAsym, s, dt, x, u), expected, 1e-8);
        EXPECT_NEAR(g_term(kAsym, s, dt, x, u), g_term_derivative_form(kAsym, s, dt, x, u), 1e-12);
    }
}

TEST(GTerm, EqualsWeightedVelocityDifference) {
    const double s = 0.9, dt = 0.6;
    for (double x : {-0.3, 0.2, 1.1}) {
        const double w1 = (x - kAsym.a2 * s) / (kAsym.spread() * s);
        for (double u : {-0.25, 0.1, 0.7}) {
            const double p1 = telegraph::density_given_v(kAsym, dt, Velocity::upper, u);
            const double p2 = telegraph::density_given_v(kAsym, dt, Velocity::lower, u);
            EXPECT_NEAR(g_term(kAsym, s, dt, x, u), (w1 - 0.5) * (p1 - p2), 1e-12);
        }
    }
}

TEST(GTerm, SymmetricSimplification) {
    const double c = 1.0, lambda = kSym.rates.lambda1, s = 0.8, dt = 0.7;
    for (double x : {-0.5, 0.3}) {
        for (double u : {-0.6, -0.1, 0.2, 0.65}) {
            const double root = std::sqrt(c * c * dt * dt - u * u);
            const double f = lambda * std::exp(-lambda * dt) / (2.0 * c * c * s * root) *
                             std::cyl_bessel_i(1.0, lambda / c * root);
            EXPECT_NEAR(g_term(kSym, s, dt, x, u), x * u * f, 1e-12);
            if (x * u > 0.0) EXPECT_GT(g_term(kSym, s, dt, x, u), 0.0);
            if (x * u < 0.0) EXPECT_LT(g_term(kSym, s, dt, x, u), 0.0);
        }
    }
}

TEST(GTerm, TwoRatesOutOfScope) {
    EXPECT_THROW(g_term(kTwoRates, 0.5, 0.5, 0.1, 0.1), ScopeError);
}

// =============================================================================
// Parity known
// =============================================================================

TEST(LawGivenParity, OddIsFreeLawShifted) {
    const Context ctx{0.6, 1.5, -0.2};
    const MixedLaw law = law_given_pos_parity(kTwoRates, ctx, Parity::odd);
    const MixedLaw free = telegraph::law(kTwoRates, 0.9);
    for (double u : {-0.7, 0.0, 0.4}) {
        EXPECT_NEAR(law.density(-0.2 + u), free.density(u), 1e-13);
    }
    EXPECT_DOUBLE_EQ(law.atoms()[0].mass, std::exp(-0.9) / 2.0);
    EXPECT_DOUBLE_EQ(law.atoms()[1].mass, std::exp(-1.8) / 2.0);
    EXPECT_NEAR(law.total_mass(), 1.0, 1e-8);
}

// Conditioning on T(s) in a narrow window; the increment is re-anchored at x.
TEST(LawGivenParity, OddTwoRatesMatchesStationaryStartSimulation) {
    const ProcessParams p{1.0, -1.0, {3.0, 1.0}};
    const double s = 1.0, t = 2.0, x = 0.2, h = 0.003;
    const MixedLaw law = law_given_pos_parity(p, {s, t, x}, Parity::odd);
    const auto bins = montecarlo::Histogram::uniform(x - 1.0, x + 1.0, 10, {x - 1.0, x + 1.0});
    const auto sum = montecarlo::conditional_histogram(
        p, montecarlo::Start::stationary, t, 8'000'000,
        [&](const telegraph::PathSample& path) {
            return std::abs(path.position(s) - x) < h && path.switches_up_to(s) % 2 == 1;
        },
        [&](const telegraph::PathSample& path) { return path.final_position() - path.position(s) + x; }, bins,
        montecarlo::RunOptions{11});
    const double n = double(sum.sample_count);
    for (const Atom& atom : law.atoms()) {
        const double se = std::sqrt(atom.mass * (1.0 - atom.mass) / n);
        EXPECT_NEAR(sum.atom_masses.at(atom.location), atom.mass, 4.5 * se);
    }
    for (std::size_t i = 0; i < sum.bin_masses.size(); ++i) {
        const double expected = law.interval_mass(sum.bin_edges[i], sum.bin_edges[i + 1]).value;
        EXPECT_NEAR(sum.bin_masses[i], expected, 4.5 * std::sqrt(expected * (1.0 - expected) / n)) << i;
    }
}

TEST(LawGivenParity, EvenContinuousMass) {
    for (double x : {-0.3, 0.25, 0.9}) {
        const Context ctx{0.8, 1.5, x};
        const MixedLaw law = law_given_pos_parity(kAsym, ctx, Parity::even);
        EXPECT_NEAR(law.continuous_mass(), 1.0 - std::exp(-1.2 * 0.7), 1e-9);
        EXPECT_NEAR(law.total_mass(), 1.0, 1e-9);
    }
}

TEST(LawGivenParity, EvenAtomsFollowVelocityPosterior) {
    const Context ctx{0.8, 1.5, 0.6};
    const MixedLaw law = law_given_pos_parity(kAsym, ctx, Parity::even);
    const double no_switch = std::exp(-1.2 * 0.7);
    const double w_upper = (0.6 + 0.5 * 0.8) / (2.0 * 0.8);
    EXPECT_NEAR(law.atoms()[1].mass, w_upper * no_switch, 1e-15);
    EXPECT_NEAR(law.atoms()[0].mass, (1.0 - w_upper) * no_switch, 1e-15);
}

TEST(LawGivenParity, EvenTwoRatesOutOfScope) {
    EXPECT_THROW(law_given_pos_parity(kTwoRates, {0.5, 1.0, 0.1}, Parity::even), ScopeError);
}

TEST(ParityPosterior, MatchesSeriesRatio) {
    for (double s : {0.3, 1.0, 2.5}) {
        for (double u : {0.01, 0.2, 0.5, 0.83, 0.999}) {
            const double x = kAsym.a2 * s + u * kAsym.spread() * s;
            EXPECT_NEAR(parity_posterior(kAsym, s, x), parity_series_ratio(kAsym, s, x), 1e-9) << s << " " << u;
        }
    }
}

TEST(ParityPosterior, NearUpperEdge) {
    const ProcessParams p{1.0, -1.0, {1.0, 1.0}};
    const double x = 1.0 - 1e-6;
    EXPECT_NEAR(parity_posterior(p, 1.0, x), parity_series_ratio(p, 1.0, x), 1e-9);
}

TEST(ParityPosterior, KacLimit) {
    const double lambda = 1000.0;
    const ProcessParams p{std::sqrt(lambda), -std::sqrt(lambda), {lambda, lambda}};
    EXPECT_NEAR(parity_posterior(p, 1.0, 0.5), 0.5, 0.01);
}

// =============================================================================
// Position only
// =============================================================================

TEST(LawGivenPosition, Normalised) {
    for (double x : {-0.3, 0.25, 0.9}) {
        EXPECT_NEAR(law_given_pos(kAsym, {0.8, 1.5, x}).total_mass(), 1.0, 1e-9);
        EXPECT_NEAR(law_given_pos(kSym, {0.8, 1.5, x * 0.5}).total_mass(), 1.0, 1e-9);
    }
}

TEST(LawGivenPosition, ParityMixture) {
    const Context ctx{0.8, 1.5, 0.25};
    const double pe = parity_posterior(kAsym, ctx.s, ctx.x);
    const MixedLaw full = law_given_pos(kAsym, ctx);
    const MixedLaw even = law_given_pos_parity(kAsym, ctx, Parity::even);
    const MixedLaw odd = law_given_pos_parity(kAsym, ctx, Parity::odd);
    for (double y : {-0.2, 0.3, 0.9}) {
        EXPECT_NEAR(full.density(y), pe * even.density(y) + (1 - pe) * odd.density(y), 1e-12);
    }
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_NEAR(full.atoms()[i].mass, pe * even.atoms()[i].mass + (1 - pe) * odd.atoms()[i].mass, 1e-15);
    }
}

TEST(LawGivenPosition, ForwardEquationResidualIsSecondOrder) {
    const ProcessParams& p = kAsym;
    const double s = 0.8, x = 0.3, t0 = 1.6, y0 = 0.55;
    const double l = p.rates.lambda1;
    auto f = [&](double t, double y) { return density_given_pos(p, s, x, t, y); };
    auto residual = [&](double hy) {
        const double ht = hy / std::max(std::abs(p.a1), std::abs(p.a2));
        const double c = f(t0, y0);
        const double ptt = (f(t0 + ht, y0) - 2 * c + f(t0 - ht, y0)) / (ht * ht);
        const double pyy = (f(t0, y0 + hy) - 2 * c + f(t0, y0 - hy)) / (hy * hy);
        const double pt = (f(t0 + ht, y0) - f(t0 - ht, y0)) / (2 * ht);
        const double py = (f(t0, y0 + hy) - f(t0, y0 - hy)) / (2 * hy);
        const double pty = (f(t0 + ht, y0 + hy) - f(t0 + ht, y0 - hy) - f(t0 - ht, y0 + hy) + f(t0 - ht, y0 - hy)) /
                           (4 * ht * hy);
        return ptt + (p.a1 + p.a2) * pty + 2 * l * pt + p.a1 * p.a2 * pyy + l * (p.a1 + p.a2) * py;
    };
    const double r1 = residual(0.04), r2 = residual(0.02), r3 = residual(0.01);
    EXPECT_NEAR(r1 / r2, 4.0, 0.5);
    EXPECT_NEAR(r2 / r3, 4.0, 0.5);
}
