#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace telegraph_kit {

/// A series or iterative scheme failed to reach its tolerance.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, double partial_sum, std::size_t terms)
        : std::runtime_error(what), partial_sum_(partial_sum), terms_(terms) {}

    double partial_sum() const noexcept { return partial_sum_; }
    std::size_t terms() const noexcept { return terms_; }

private:
    double partial_sum_;
    std::size_t terms_;
};

/// The requested law is only known for a restricted parameter set
/// (for instance equal switching rates).
class ScopeError : public std::domain_error {
public:
    explicit ScopeError(const std::string& what) : std::domain_error("out of scope: " + what) {}
};

/// A recursive evaluator would exceed its configured depth.
class CapabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A rate estimator cannot be formed from the given record.
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Conditioned sampling accepted too few paths to be useful.
class AcceptanceError : public std::runtime_error {
public:
    AcceptanceError(const std::string& what, double acceptance)
        : std::runtime_error(what), acceptance_(acceptance) {}
    double acceptance() const noexcept { return acceptance_; }

private:
    double acceptance_;
};

}  // namespace telegraph_kit
