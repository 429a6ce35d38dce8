#include "telegraph_kit/conditional.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "telegraph_kit/errors.hpp"
#include "telegraph_kit/special_functions.hpp"
#include "telegraph_kit/telegraph.hpp"

namespace telegraph_kit::conditional {

namespace {

void require_equal_rates(const ProcessParams& params, const char* what) {
    if (!params.equal_rates()) {
        throw ScopeError(std::string(what) + " is only available for lambda1 == lambda2");
    }
}

bool strictly_inside(const ProcessParams& params, double s, double x) {
    return x > params.a2 * s && x < params.a1 * s;
}

// Posterior weight of V(0) = v given T(s) = x and an even number of switches.
double even_weight(const ProcessParams& params, double s, double x, Velocity v) {
    return std::abs(params.speed(other(v)) * s - x) / (params.spread() * s);
}

}  // namespace

void Context::validate(const ProcessParams& params) const {
    params.validate();
    if (!(s > 0.0) || !(t > s)) {
        throw std::invalid_argument("conditioning requires 0 < s < t");
    }
    if (!strictly_inside(params, s, x)) {
        throw std::invalid_argument("conditioning position must lie in (a2 s, a1 s)");
    }
}

MixedLaw law_given_pos_count_vel(const ProcessParams& params, const Context& ctx, long long k, Velocity v0) {
    params.validate();
    if (!(ctx.s > 0.0) || !(ctx.t > ctx.s)) {
        throw std::invalid_argument("conditioning requires 0 < s < t");
    }
    if (ctx.x < params.a2 * ctx.s || ctx.x > params.a1 * ctx.s) {
        throw std::invalid_argument("conditioning position must lie in [a2 s, a1 s]");
    }
    if (k < 0) {
        throw std::invalid_argument("switch count must be nonnegative");
    }
    const Velocity vk = v_after_k(v0, k);
    const double dt = ctx.remaining();
    const double x = ctx.x;
    std::vector<Atom> atoms{{x + params.speed(vk) * dt, std::exp(-params.rate(vk) * dt)}};
    return MixedLaw(std::move(atoms), x + params.a2 * dt, x + params.a1 * dt,
                    [params, dt, vk, x](double y) { return telegraph::density_given_v(params, dt, vk, y - x); });
}

double g_term(const ProcessParams& params, double s, double dt, double x, double u) {
    params.validate();
    require_equal_rates(params, "the even-parity correction");
    if (!(s > 0.0) || !(dt > 0.0) || !strictly_inside(params, s, x) || !strictly_inside(params, dt, u)) {
        return 0.0;
    }
    const double lambda = params.rates.lambda1;
    const double w = params.spread();
    const double sum = params.a1 + params.a2;
    const double r = std::sqrt((params.a1 * dt - u) * (u - params.a2 * dt));
    const double z = 2.0 * lambda * r / w;
    // 4xu + (a1 + a2)[(a1 + a2) s dt - 2 s u - 2 dt x], factored.
    const double bracket = (sum * s - 2.0 * x) * (sum * dt - 2.0 * u);
    // I_1(z) / r = (2 lambda / w) I_1(z) / z, which stays finite as r -> 0.
    const double i1_over_r = 2.0 * lambda / w * special::bessel_i1_over_x_scaled(z);
    return std::exp(z - lambda * dt) * i1_over_r * lambda / (2.0 * w * w * s) * bracket;
}

double g_term_derivative_form(const ProcessParams& params, double s, double dt, double x, double u) {
    params.validate();
    require_equal_rates(params, "the even-parity correction");
    if (!(s > 0.0) || !(dt > 0.0) || !strictly_inside(params, s, x) || !strictly_inside(params, dt, u)) {
        return 0.0;
    }
    const double lambda = params.rates.lambda1;
    const double w = params.spread();
    const double sum = params.a1 + params.a2;
    const double r = std::sqrt((params.a1 * dt - u) * (u - params.a2 * dt));
    const double z = 2.0 * lambda * r / w;
    // d/du I_0(z(u)) = I_1(z) z'(u), z'(u) = (lambda / w) ((a1 + a2) dt - 2u) / r.
    const double dz_du_over_z = ((sum * dt - 2.0 * u) / (2.0 * r * r));
    const double d_i0 = z * z * special::bessel_i1_over_x_scaled(z) * dz_du_over_z;
    return std::exp(z - lambda * dt) * (sum * s - 2.0 * x) / (2.0 * w * s) * d_i0;
}

MixedLaw law_given_pos_parity(const ProcessParams& params, const Context& ctx, counting::Parity parity) {
    ctx.validate(params);
    const double dt = ctx.remaining();
    const double x = ctx.x;
    const double lower = x + params.a2 * dt;
    const double upper = x + params.a1 * dt;
    if (parity == counting::Parity::odd) {
        std::vector<Atom> atoms{{x + params.a2 * dt, telegraph::atom_mass(params, Velocity::lower, dt)},
                                {x + params.a1 * dt, telegraph::atom_mass(params, Velocity::upper, dt)}};
        return MixedLaw(std::move(atoms), lower, upper,
                        [params, dt, x](double y) { return telegraph::density(params, dt, y - x); });
    }
    require_equal_rates(params, "the even-parity conditional law");
    const double s = ctx.s;
    const double no_switch = std::exp(-params.rates.lambda1 * dt);
    std::vector<Atom> atoms{{x + params.a2 * dt, even_weight(params, s, x, Velocity::lower) * no_switch},
                            {x + params.a1 * dt, even_weight(params, s, x, Velocity::upper) * no_switch}};
    return MixedLaw(std::move(atoms), lower, upper, [params, s, dt, x](double y) {
        return telegraph::density(params, dt, y - x) + g_term(params, s, dt, x, y - x);
    });
}

double parity_posterior(const ProcessParams& params, double s, double x) {
    params.validate();
    require_equal_rates(params, "the parity posterior");
    if (!(s > 0.0) || !strictly_inside(params, s, x)) {
        throw std::invalid_argument("parity posterior requires s > 0 and a2 s < x < a1 s");
    }
    const double w = params.spread();
    const double a = std::sqrt((params.a1 * s - x) * (x - params.a2 * s));
    const double z = 2.0 * params.rates.lambda1 / w * a;
    // Divide through by A I_0 and use I_1(z) / A = (2 lambda / w) I_1(z) / z.
    const double ratio = w * s * 2.0 * params.rates.lambda1 / w * special::bessel_i1_over_x_scaled(z) /
                         special::bessel_i_scaled(0, z);
    return ratio / (2.0 + ratio);
}

MixedLaw law_given_pos(const ProcessParams& params, const Context& ctx) {
    ctx.validate(params);
    require_equal_rates(params, "the position-only conditional law");
    const double s = ctx.s;
    const double dt = ctx.remaining();
    const double x = ctx.x;
    const double even = parity_posterior(params, s, x);
    const double no_switch = std::exp(-params.rates.lambda1 * dt);
    auto atom = [&](Velocity v) {
        return no_switch / 2.0 * (1.0 + even * (2.0 * even_weight(params, s, x, v) - 1.0));
    };
    std::vector<Atom> atoms{{x + params.a2 * dt, atom(Velocity::lower)}, {x + params.a1 * dt, atom(Velocity::upper)}};
    return MixedLaw(std::move(atoms), x + params.a2 * dt, x + params.a1 * dt, [params, s, dt, x, even](double y) {
        return telegraph::density(params, dt, y - x) + even * g_term(params, s, dt, x, y - x);
    });
}

double density_given_pos(const ProcessParams& params, double s, double x, double t, double y) {
    const double dt = t - s;
    if (!(dt > 0.0)) {
        return 0.0;
    }
    return telegraph::density(params, dt, y - x) + parity_posterior(params, s, x) * g_term(params, s, dt, x, y - x);
}

}  // namespace telegraph_kit::conditional
