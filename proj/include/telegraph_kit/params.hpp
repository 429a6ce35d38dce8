#pragma once

#include <stdexcept>

namespace telegraph_kit {

/// Switching rates: lambda1 while moving at the upper velocity a1,
/// lambda2 while moving at the lower velocity a2.
struct RatePair {
    double lambda1 = 1.0;
    double lambda2 = 1.0;

    RatePair swapped() const { return {lambda2, lambda1}; }
    bool equal() const { return lambda1 == lambda2; }
    void validate() const {
        if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) {
            throw std::invalid_argument("switching rates must be positive");
        }
    }
};

enum class Velocity { upper, lower };

inline Velocity other(Velocity v) { return v == Velocity::upper ? Velocity::lower : Velocity::upper; }

/// Velocity after k switches when the motion started with v0.
inline Velocity after_switches(Velocity v0, long long k) { return k % 2 == 0 ? v0 : other(v0); }

struct ProcessParams {
    double a1 = 1.0;  ///< upper velocity
    double a2 = -1.0; ///< lower velocity
    RatePair rates;

    double speed(Velocity v) const { return v == Velocity::upper ? a1 : a2; }
    double rate(Velocity v) const { return v == Velocity::upper ? rates.lambda1 : rates.lambda2; }
    /// Rates in the order they are used by a motion that starts with v.
    RatePair rates_from(Velocity v) const { return v == Velocity::upper ? rates : rates.swapped(); }
    double spread() const { return a1 - a2; }

    bool equal_rates() const { return rates.equal(); }
    bool symmetric() const { return a1 == -a2 && a1 > 0.0 && rates.equal(); }

    void validate() const {
        if (!(a1 > a2)) {
            throw std::invalid_argument("velocities must satisfy a1 > a2");
        }
        rates.validate();
    }
};

}  // namespace telegraph_kit
