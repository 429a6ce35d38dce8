#pragma once

#include <functional>
#include <vector>

#include "telegraph_kit/quadrature.hpp"

namespace telegraph_kit {

struct Atom {
    double location = 0.0;
    double mass = 0.0;
};

/// Distribution made of point masses plus an absolutely continuous part
/// supported on the open interval (lower, upper).
class MixedLaw {
public:
    using Density = std::function<double(double)>;

    MixedLaw(std::vector<Atom> atoms, double lower, double upper, Density density)
        : atoms_(std::move(atoms)), lower_(lower), upper_(upper), density_(std::move(density)) {}

    const std::vector<Atom>& atoms() const { return atoms_; }
    double lower() const { return lower_; }
    double upper() const { return upper_; }

    /// Continuous density; zero on the closed complement of (lower, upper).
    double density(double y) const { return (y > lower_ && y < upper_) ? density_(y) : 0.0; }

    double atom_mass() const {
        double total = 0.0;
        for (const Atom& atom : atoms_) {
            total += atom.mass;
        }
        return total;
    }

    /// Integral of the density over (a, b) intersected with the support.
    quadrature::Result interval_mass(double a, double b, const quadrature::Options& options = {}) const {
        const double lo = a > lower_ ? a : lower_;
        const double hi = b < upper_ ? b : upper_;
        return quadrature::integrate([this](double y) { return density_(y); }, lo, hi, options);
    }

    double continuous_mass(const quadrature::Options& options = {}) const {
        return interval_mass(lower_, upper_, options).value;
    }

    double total_mass(const quadrature::Options& options = {}) const {
        return atom_mass() + continuous_mass(options);
    }

    /// Right-continuous distribution function.
    double cdf(double y, const quadrature::Options& options = {}) const {
        double value = interval_mass(lower_, y, options).value;
        for (const Atom& atom : atoms_) {
            if (atom.location <= y) {
                value += atom.mass;
            }
        }
        return value;
    }

private:
    std::vector<Atom> atoms_;
    double lower_;
    double upper_;
    Density density_;
};

}  // namespace telegraph_kit
