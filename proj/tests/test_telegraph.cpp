#include <cmath>
#include <gtest/gtest.h>

#include "telegraph_kit/counting.hpp"
#include "telegraph_kit/errors.hpp"
#include "telegraph_kit/telegraph.hpp"

using namespace telegraph_kit;
using namespace telegraph_kit::telegraph;

namespace {

const ProcessParams kAsym{1.0, -1.0, {2.0, 1.0}};
const ProcessParams kDrift{2.0, -0.5, {1.3, 0.6}};

// Density of T(t) | N(t) = n, V(0) = v0 through the affine map onto the
// alternating sum of arrival times.
double density_via_alt_sum(const ProcessParams& p, double t, int n, Velocity v0, double x) {
    const double v_start = p.speed(v0);
    const double v_other = p.speed(other(v0));
    const double anchor = n % 2 == 0 ? v_start * t : v_other * t;
    const double s = (x - anchor) / (v_start - v_other);
    return counting::alt_sum_density(p.rates_from(v0), t, n, s) / std::abs(v_start - v_other);
}

}  // namespace

// =============================================================================
// Paths
// =============================================================================

TEST(PathSample, NoSwitchesMovesStraight) {
    const PathSample path(kDrift, Velocity::lower, {2.0, {}});
    EXPECT_DOUBLE_EQ(path.final_position(), -1.0);
    EXPECT_DOUBLE_EQ(path.min_up_to(2.0), -1.0);
    EXPECT_DOUBLE_EQ(path.max_up_to(2.0), 0.0);
}

TEST(PathSample, PositionQueries) {
    const PathSample path(kDrift, Velocity::upper, {3.0, {1.0, 2.5}});
    EXPECT_DOUBLE_EQ(path.position(0.0), 0.0);
    EXPECT_DOUBLE_EQ(path.position(1.0), 2.0);
    EXPECT_DOUBLE_EQ(path.position(2.0), 1.5);
    EXPECT_DOUBLE_EQ(path.position(3.0), 2.25);
    EXPECT_DOUBLE_EQ(path.max_up_to(3.0), 2.25);
    EXPECT_DOUBLE_EQ(path.min_up_to(2.5), 0.0);
    EXPECT_EQ(path.switches_up_to(2.0), 1u);
}

TEST(PathSample, AlternatingSumDecomposition) {
    for (std::uint64_t i = 0; i < 2000; ++i) {
        PhiloxStream rng(5, i);
        const Velocity v0 = i % 2 == 0 ? Velocity::upper : Velocity::lower;
        const PathSample path = simulate_path(kDrift, v0, 1.7, rng);
        const double s = counting::alternating_sum(path.switches());
        const double v_start = kDrift.speed(v0), v_other = kDrift.speed(other(v0));
        const auto n = path.switch_count();
        if (n % 2 == 1) {
            EXPECT_NEAR(path.final_position(), (v_start - v_other) * s + v_other * 1.7, 1e-12);
            EXPECT_NEAR(path.time_at_initial_velocity(), s, 1e-12);
        } else {
            EXPECT_NEAR(path.final_position(), (v_start - v_other) * s + v_start * 1.7, 1e-12);
        }
    }
}

TEST(PathSample, SpeedBoundAndVelocityPersistence) {
    for (std::uint64_t i = 0; i < 2000; ++i) {
        PhiloxStream rng(6, i);
        const Velocity v0 = i % 3 == 0 ? Velocity::upper : Velocity::lower;
        const PathSample path = simulate_path(kDrift, v0, 2.0, rng);
        const double x = path.final_position();
        EXPECT_LE(kDrift.a2 * 2.0 - 1e-12, x);
        EXPECT_LE(x, kDrift.a1 * 2.0 + 1e-12);
        // Final slope equals the initial one iff the switch count is even.
        const double slope = (path.position(2.0) - path.position(2.0 - 1e-9)) / 1e-9;
        const bool same = std::abs(slope - kDrift.speed(v0)) < 1e-4;
        if (path.switches().arrival_times.empty() || path.switches().arrival_times.back() < 2.0 - 1e-9) {
            EXPECT_EQ(same, path.switch_count() % 2 == 0);
        }
        EXPECT_LE(path.min_up_to(2.0), x);
        EXPECT_GE(path.max_up_to(2.0), x);
    }
}

// =============================================================================
// Atoms
// =============================================================================

TEST(Atoms, Masses) {
    EXPECT_DOUBLE_EQ(atom_mass({1.0, -1.0, {1.0, 1.0}}, Velocity::upper, 0.0), 0.5);
    EXPECT_DOUBLE_EQ(atom_mass(kAsym, Velocity::upper, 1.0), std::exp(-2.0) / 2.0);
    EXPECT_DOUBLE_EQ(atom_mass_given_v(kAsym, Velocity::lower, Velocity::lower, 1.0), std::exp(-1.0));
    EXPECT_EQ(atom_mass_given_v(kAsym, Velocity::lower, Velocity::upper, 1.0), 0.0);
}

TEST(Atoms, UnconditionalLawIsNormalised) {
    for (const ProcessParams& p : {kAsym, kDrift, ProcessParams{1.0, -1.0, {1.0, 1.0}}}) {
        for (double t : {0.3, 1.0, 2.5}) {
            EXPECT_NEAR(law(p, t).total_mass(), 1.0, 1e-8);
            EXPECT_NEAR(law_given_v(p, t, Velocity::upper).total_mass(), 1.0, 1e-8);
            EXPECT_NEAR(law_given_v(p, t, Velocity::lower).total_mass(), 1.0, 1e-8);
        }
    }
}

// =============================================================================
// Conditional densities
// =============================================================================

TEST(DensityGivenNV, SingleSwitchEqualRatesIsUniform) {
    const ProcessParams p{1.5, -0.5, {0.7, 0.7}};
    for (double x : {-0.4, 0.0, 1.2}) {
        EXPECT_NEAR(density_given_n_v(p, 1.0, 1, Velocity::upper, x), 0.5, 1e-14);
        EXPECT_NEAR(density_given_n_v(p, 1.0, 1, Velocity::lower, x), 0.5, 1e-14);
    }
}

TEST(DensityGivenNV, MatchesAlternatingSumRoute) {
    for (const ProcessParams& p : {kAsym, kDrift, ProcessParams{3.0, 1.0, {0.2, 5.0}}}) {
        for (int n = 1; n <= 9; ++n) {
            for (Velocity v0 : {Velocity::upper, Velocity::lower}) {
                for (double u : {0.05, 0.3, 0.61, 0.93}) {
                    const double t = 1.2;
                    const double x = p.a2 * t + u * p.spread() * t;
                    const double expected = density_via_alt_sum(p, t, n, v0, x);
                    EXPECT_NEAR(density_given_n_v(p, t, n, v0, x), expected, 1e-12 * (1.0 + expected)) << n;
                }
            }
        }
    }
}

TEST(DensityGivenNV, Normalised) {
    for (const RatePair rates : {RatePair{1.0, 1.0}, RatePair{2.0, 1.0}}) {
        const ProcessParams p{1.0, -1.0, rates};
        for (int n = 1; n <= 12; ++n) {
            for (Velocity v0 : {Velocity::upper, Velocity::lower}) {
                const auto r = quadrature::integrate([&](double x) { return density_given_n_v(p, 1.0, n, v0, x); },
                                                     -1.0, 1.0);
                EXPECT_NEAR(r.value, 1.0, 1e-8) << n;
            }
        }
    }
}

TEST(DensityGivenNV, OddCaseIgnoresInitialVelocity) {
    for (int n : {1, 3, 7}) {
        EXPECT_DOUBLE_EQ(density_given_n_v(kDrift, 1.0, n, Velocity::upper, 0.4),
                         density_given_n_v(kDrift, 1.0, n, Velocity::lower, 0.4));
    }
}

TEST(DensityGivenNV, EvenRatioAtEqualRates) {
    const ProcessParams p{2.0, -0.5, {1.1, 1.1}};
    const double t = 1.0;
    for (int n : {2, 4, 8}) {
        for (double x : {-0.3, 0.4, 1.5}) {
            const double ratio = density_given_n_v(p, t, n, Velocity::upper, x) /
                                 density_given_n_v(p, t, n, Velocity::lower, x);
            EXPECT_NEAR(ratio, (x - p.a2 * t) / (p.a1 * t - x), 1e-12);
        }
    }
}

TEST(DensityGivenNV, OutsideSupportIsZero) {
    EXPECT_EQ(density_given_n_v(kAsym, 1.0, 2, Velocity::upper, 1.0), 0.0);
    EXPECT_EQ(density_given_n_v(kAsym, 1.0, 2, Velocity::upper, -1.2), 0.0);
}

TEST(DensityGivenV, LawOfTotalProbability) {
    for (const ProcessParams& p : {kAsym, kDrift}) {
        for (Velocity v0 : {Velocity::upper, Velocity::lower}) {
            const double t = 1.4;
            const auto table = counting::pmf_table(p.rates_from(v0), t);
            for (double u : {0.02, 0.2, 0.5, 0.77, 0.98}) {
                const double x = p.a2 * t + u * p.spread() * t;
                double mixture = 0.0;
                for (std::size_t n = 1; n < table.size(); ++n) {
                    mixture += table[n] * density_given_n_v(p, t, int(n), v0, x);
                }
                EXPECT_NEAR(density_given_v(p, t, v0, x), mixture, 1e-9);
            }
        }
    }
}

TEST(DensityGivenV, FiniteLimitAtStartingEdge) {
    const double t = 1.0;
    const double near_top = density_given_v(kAsym, t, Velocity::upper, 1.0 - 1e-9);
    const double closer = density_given_v(kAsym, t, Velocity::upper, 1.0 - 1e-12);
    EXPECT_TRUE(std::isfinite(near_top));
    EXPECT_NEAR(near_top, closer, 1e-8);
    EXPECT_EQ(density_given_v(kAsym, t, Velocity::upper, 1.0), 0.0);
}

TEST(DensityGivenV, SymmetricClosedForm) {
    // c = lambda = t = 1 at x = 0: (lambda / 2c) e^{-lambda t} [I0(lambda t) + I1(lambda t)] for either v0.
    const ProcessParams p{1.0, -1.0, {1.0, 1.0}};
    const double expected = 0.5 * std::exp(-1.0) * (std::cyl_bessel_i(0.0, 1.0) + std::cyl_bessel_i(1.0, 1.0));
    EXPECT_NEAR(density_given_v(p, 1.0, Velocity::upper, 0.0), expected, 1e-14);
    EXPECT_NEAR(density_given_v(p, 1.0, Velocity::lower, 0.0), expected, 1e-14);
}

TEST(DensityGivenV, LargeRatesStayFinite) {
    const ProcessParams p{std::sqrt(1000.0), -std::sqrt(1000.0), {1000.0, 1000.0}};
    const double value = density(p, 1.0, 0.0);
    EXPECT_TRUE(std::isfinite(value));
    EXPECT_NEAR(value, 1.0 / std::sqrt(2.0 * M_PI), 1e-3);
}

// =============================================================================
// Velocity posterior
// =============================================================================

TEST(VelocityPosterior, OddIsHalf) {
    EXPECT_EQ(velocity_posterior(kAsym, 1.0, 3, 0.2, Velocity::upper), 0.5);
    EXPECT_EQ(velocity_posterior(kDrift, 1.0, 1, 0.2, Velocity::lower), 0.5);
}

TEST(VelocityPosterior, EvenMidpointIsHalf) {
    const ProcessParams p{2.0, -0.5, {1.1, 1.1}};
    EXPECT_NEAR(velocity_posterior(p, 2.0, 4, 1.5, Velocity::upper), 0.5, 1e-15);
    EXPECT_NEAR(velocity_posterior(p, 2.0, 4, 1.5, Velocity::upper) +
                    velocity_posterior(p, 2.0, 4, 1.5, Velocity::lower),
                1.0, 1e-15);
}

TEST(VelocityPosterior, SymmetricSignRule) {
    const ProcessParams p{1.0, -1.0, {1.0, 1.0}};
    EXPECT_GT(velocity_posterior(p, 1.0, 2, 0.3, Velocity::upper), 0.5);
    EXPECT_LT(velocity_posterior(p, 1.0, 2, -0.3, Velocity::upper), 0.5);
}

TEST(VelocityPosterior, EvenTwoRatesOutOfScope) {
    EXPECT_THROW(velocity_posterior(kAsym, 1.0, 2, 0.2, Velocity::upper), ScopeError);
}

TEST(DensityGivenNV, MatchesConditionedSimulation) {
    // Rejection on N(t) = 3, V(0) = a1, 2 * 10^5 accepted paths.
    const double t = 1.0;
    const int n = 3;
    std::vector<int> bins(10, 0);
    int accepted = 0;
    PathSample path;
    for (std::uint64_t i = 0; accepted < 200000; ++i) {
        PhiloxStream rng(9, i);
        simulate_path_into(path, kAsym, Velocity::upper, t, rng);
        if (path.switch_count() != n) continue;
        ++accepted;
        const int b = static_cast<int>((path.final_position() + 1.0) / 0.2);
        ++bins[std::clamp(b, 0, 9)];
    }
    for (int b = 0; b < 10; ++b) {
        const double lo = -1.0 + 0.2 * b;
        const double mass =
            quadrature::integrate([&](double x) { return density_given_n_v(kAsym, t, n, Velocity::upper, x); }, lo,
                                  lo + 0.2)
                .value;
        const double se = std::sqrt(mass * (1 - mass) / accepted);
        EXPECT_LT(std::abs(bins[b] / double(accepted) - mass), 4.0 * se) << b;
    }
}
