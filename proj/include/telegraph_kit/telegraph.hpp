#pragma once

#include <cstddef>
#include <vector>

#include "telegraph_kit/counting.hpp"
#include "telegraph_kit/mixed_law.hpp"
#include "telegraph_kit/params.hpp"
#include "telegraph_kit/random.hpp"

namespace telegraph_kit::telegraph {

/// One simulated trajectory on [0, horizon]: piecewise linear, starting at 0
/// with velocity v0 and alternating at each recorded switch.
class PathSample {
public:
    PathSample() = default;
    PathSample(const ProcessParams& params, Velocity v0, counting::SwitchRecord switches);

    Velocity initial_velocity() const { return v0_; }
    const counting::SwitchRecord& switches() const { return switches_; }
    double horizon() const { return switches_.horizon; }
    std::size_t switch_count() const { return switches_.count(); }
    /// Number of switches in (0, s].
    std::size_t switches_up_to(double s) const;

    double position(double s) const;
    double min_up_to(double s) const;
    double max_up_to(double s) const;
    double final_position() const { return position(horizon()); }

    /// Positions at 0, T_1, ..., T_N and at the horizon.
    const std::vector<double>& vertices() const { return vertices_; }

    /// Total time spent moving with the initial velocity up to the horizon.
    double time_at_initial_velocity() const;

    /// inf{s : position(s) > level} for level >= 0, inf{s : position(s) < level}
    /// for level < 0; +infinity if the path never gets there.
    double first_passage_time(double level) const;
    double first_passage_above(double level) const;
    double first_passage_below(double level) const;

    /// Refill from fresh switches, reusing storage.
    void assign(const ProcessParams& params, Velocity v0, double horizon);
    std::vector<double>& mutable_arrivals() { return switches_.arrival_times; }
    void rebuild();

private:
    double speed_of_segment(std::size_t i) const { return i % 2 == 0 ? v_start_ : v_other_; }

    Velocity v0_ = Velocity::upper;
    double v_start_ = 0.0;
    double v_other_ = 0.0;
    counting::SwitchRecord switches_;
    std::vector<double> vertices_;
    std::vector<double> prefix_min_;
    std::vector<double> prefix_max_;
};

/// Switch rates are drawn in the order (lambda1, lambda2) for v0 = a1 and
/// (lambda2, lambda1) for v0 = a2.
PathSample simulate_path(const ProcessParams& params, Velocity v0, double t, PhiloxStream& rng);
void simulate_path_into(PathSample& out, const ProcessParams& params, Velocity v0, double t, PhiloxStream& rng);

/// P{T(t) = a_i t} with V(0) uniform on {a1, a2}: e^{-lambda_i t} / 2.
double atom_mass(const ProcessParams& params, Velocity atom, double t);
/// P{T(t) = a_i t | V(0) = v0}: e^{-lambda_i t} if atom == v0, else 0.
double atom_mass_given_v(const ProcessParams& params, Velocity atom, Velocity v0, double t);

/// Density of T(t) given N(t) = n >= 1 and V(0) = v0, on (a2 t, a1 t).
double density_given_n_v(const ProcessParams& params, double t, int n, Velocity v0, double x);

/// Absolutely continuous part of T(t) given V(0) = v0, on (a2 t, a1 t).
/// Finite up to both endpoints; the endpoints themselves return 0.
double density_given_v(const ProcessParams& params, double t, Velocity v0, double x);

/// Absolutely continuous part of T(t) with V(0) uniform on {a1, a2}.
double density(const ProcessParams& params, double t, double x);

MixedLaw law_given_v(const ProcessParams& params, double t, Velocity v0);
MixedLaw law(const ProcessParams& params, double t);

/// P{V(0) = v0 | T(t) = x, N(t) = n}. The odd value 1/2 holds for two rates
/// when V(0) follows the stationary law; the even case needs lambda1 == lambda2
/// and throws ScopeError otherwise.
double velocity_posterior(const ProcessParams& params, double t, int n, double x, Velocity v0);

}  // namespace telegraph_kit::telegraph
