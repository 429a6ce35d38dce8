#include "telegraph_kit/telegraph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "telegraph_kit/errors.hpp"
#include "telegraph_kit/special_functions.hpp"

namespace telegraph_kit::telegraph {
namespace {

double log_ml(double gamma, double delta, double x) {
    return special::log_mittag_leffler({1.0, delta, gamma}, x);
}

double log_power(double x, int p) { return p == 0 ? 0.0 : p * std::log(x); }

bool inside(const ProcessParams& params, double t, double x) {
    return x > params.a2 * t && x < params.a1 * t;
}

}  // namespace

PathSample::PathSample(const ProcessParams& params, Velocity v0, counting::SwitchRecord switches)
    : v0_(v0), v_start_(params.speed(v0)), v_other_(params.speed(other(v0))), switches_(std::move(switches)) {
    switches_.validate();
    rebuild();
}

void PathSample::assign(const ProcessParams& params, Velocity v0, double horizon) {
    v0_ = v0;
    v_start_ = params.speed(v0);
    v_other_ = params.speed(other(v0));
    switches_.horizon = horizon;
}

void PathSample::rebuild() {
    const auto& times = switches_.arrival_times;
    vertices_.resize(times.size() + 2);
    prefix_min_.resize(vertices_.size());
    prefix_max_.resize(vertices_.size());
    vertices_[0] = 0.0;
    prefix_min_[0] = prefix_max_[0] = 0.0;
    double previous = 0.0;
    for (std::size_t i = 0; i <= times.size(); ++i) {
        const double end = i < times.size() ? times[i] : switches_.horizon;
        vertices_[i + 1] = vertices_[i] + speed_of_segment(i) * (end - previous);
        prefix_min_[i + 1] = std::min(prefix_min_[i], vertices_[i + 1]);
        prefix_max_[i + 1] = std::max(prefix_max_[i], vertices_[i + 1]);
        previous = end;
    }
}

std::size_t PathSample::switches_up_to(double s) const {
    const auto& times = switches_.arrival_times;
    return static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), s) - times.begin());
}

double PathSample::position(double s) const {
    s = std::clamp(s, 0.0, horizon());
    const std::size_t i = switches_up_to(s);
    const double start = i == 0 ? 0.0 : switches_.arrival_times[i - 1];
    return vertices_[i] + speed_of_segment(i) * (s - start);
}

double PathSample::min_up_to(double s) const {
    s = std::clamp(s, 0.0, horizon());
    return std::min(prefix_min_[switches_up_to(s)], position(s));
}

double PathSample::max_up_to(double s) const {
    s = std::clamp(s, 0.0, horizon());
    return std::max(prefix_max_[switches_up_to(s)], position(s));
}

double PathSample::time_at_initial_velocity() const {
    const auto& times = switches_.arrival_times;
    double total = 0.0;
    double previous = 0.0;
    for (std::size_t i = 0; i <= times.size(); ++i) {
        const double end = i < times.size() ? times[i] : horizon();
        if (i % 2 == 0) {
            total += end - previous;
        }
        previous = end;
    }
    return total;
}

double PathSample::first_passage_above(double level) const {
    double previous = 0.0;
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
        const double end = i < switches_.arrival_times.size() ? switches_.arrival_times[i] : horizon();
        if (vertices_[i + 1] > level) {
            return previous + (level - vertices_[i]) / speed_of_segment(i);
        }
        previous = end;
    }
    return std::numeric_limits<double>::infinity();
}

double PathSample::first_passage_below(double level) const {
    double previous = 0.0;
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
        const double end = i < switches_.arrival_times.size() ? switches_.arrival_times[i] : horizon();
        if (vertices_[i + 1] < level) {
            return previous + (level - vertices_[i]) / speed_of_segment(i);
        }
        previous = end;
    }
    return std::numeric_limits<double>::infinity();
}

double PathSample::first_passage_time(double level) const {
    return level >= 0.0 ? first_passage_above(level) : first_passage_below(level);
}

void simulate_path_into(PathSample& out, const ProcessParams& params, Velocity v0, double t, PhiloxStream& rng) {
    out.assign(params, v0, t);
    counting::simulate_switches_into(params.rates_from(v0), t, rng, out.mutable_arrivals());
    out.rebuild();
}

PathSample simulate_path(const ProcessParams& params, Velocity v0, double t, PhiloxStream& rng) {
    params.validate();
    if (!(t > 0.0)) {
        throw std::invalid_argument("simulate_path: horizon must be positive");
    }
    PathSample path;
    simulate_path_into(path, params, v0, t, rng);
    return path;
}

double atom_mass(const ProcessParams& params, Velocity atom, double t) {
    params.validate();
    return 0.5 * std::exp(-params.rate(atom) * t);
}

double atom_mass_given_v(const ProcessParams& params, Velocity atom, Velocity v0, double t) {
    params.validate();
    return atom == v0 ? std::exp(-params.rate(atom) * t) : 0.0;
}

double density_given_n_v(const ProcessParams& params, double t, int n, Velocity v0, double x) {
    params.validate();
    if (n < 1) {
        throw std::invalid_argument("density_given_n_v requires n >= 1");
    }
    if (!(t > 0.0) || !inside(params, t, x)) {
        return 0.0;
    }
    const double d = params.rates.lambda1 - params.rates.lambda2;
    const double w = params.spread();
    const double to_top = params.a1 * t - x;
    const double to_bottom = x - params.a2 * t;
    const double tilt = d * to_top / w;
    if (n % 2 == 1) {
        const int k = (n - 1) / 2;
        const double log_density = tilt - log_ml(k + 1.0, 2.0 * k + 2.0, t * d) + log_power(to_top, k) +
                                   log_power(to_bottom, k) - 2.0 * std::lgamma(k + 1.0) -
                                   (2.0 * k + 1.0) * std::log(w * t);
        return std::exp(log_density);
    }
    const int k = n / 2;
    const double common = tilt - std::lgamma(k + 1.0) - std::lgamma(static_cast<double>(k)) -
                          2.0 * k * std::log(w * t);
    if (v0 == Velocity::upper) {
        return std::exp(common - log_ml(k, 2.0 * k + 1.0, t * d) + log_power(to_top, k - 1) +
                        log_power(to_bottom, k));
    }
    return std::exp(common - log_ml(k + 1.0, 2.0 * k + 1.0, t * d) + log_power(to_top, k) +
                    log_power(to_bottom, k - 1));
}

double density_given_v(const ProcessParams& params, double t, Velocity v0, double x) {
    params.validate();
    if (!(t > 0.0) || !inside(params, t, x)) {
        return 0.0;
    }
    const double l1 = params.rates.lambda1;
    const double l2 = params.rates.lambda2;
    const double w = params.spread();
    const double to_top = params.a1 * t - x;
    const double to_bottom = x - params.a2 * t;
    const double exponent = (l1 * to_bottom + l2 * to_top) / w;
    const double z = 2.0 * std::sqrt(l1 * l2) / w * std::sqrt(to_top * to_bottom);
    const double distance_other = std::abs(params.speed(other(v0)) * t - x);
    // sqrt(|v1 t - x| / |v0 t - x|) I_1(z) rewritten through I_1(z)/z, finite at x = v0 t.
    const double bracket = params.rate(v0) * special::bessel_i_scaled(0, z) +
                           2.0 * l1 * l2 * distance_other / w * special::bessel_i1_over_x_scaled(z);
    return std::exp(z - exponent) / w * bracket;
}

double density(const ProcessParams& params, double t, double x) {
    return 0.5 * (density_given_v(params, t, Velocity::upper, x) + density_given_v(params, t, Velocity::lower, x));
}

MixedLaw law_given_v(const ProcessParams& params, double t, Velocity v0) {
    params.validate();
    std::vector<Atom> atoms{{params.speed(v0) * t, std::exp(-params.rate(v0) * t)}};
    return MixedLaw(std::move(atoms), params.a2 * t, params.a1 * t,
                    [params, t, v0](double x) { return density_given_v(params, t, v0, x); });
}

MixedLaw law(const ProcessParams& params, double t) {
    params.validate();
    std::vector<Atom> atoms{{params.a2 * t, atom_mass(params, Velocity::lower, t)},
                            {params.a1 * t, atom_mass(params, Velocity::upper, t)}};
    return MixedLaw(std::move(atoms), params.a2 * t, params.a1 * t,
                    [params, t](double x) { return density(params, t, x); });
}

double velocity_posterior(const ProcessParams& params, double t, int n, double x, Velocity v0) {
    params.validate();
    if (n < 1) {
        throw std::invalid_argument("velocity_posterior requires n >= 1");
    }
    if (!inside(params, t, x)) {
        throw std::invalid_argument("velocity_posterior requires a2 t < x < a1 t");
    }
    if (n % 2 == 1) {
        return 0.5;
    }
    if (!params.equal_rates()) {
        throw ScopeError("even-switch velocity posterior is only known for lambda1 == lambda2");
    }
    return std::abs(params.speed(other(v0)) * t - x) / (params.spread() * t);
}

}  // namespace telegraph_kit::telegraph
