#pragma once

#include <stdexcept>
#include <string>

namespace gridsynth {

/// Malformed input document (bad JSON, wrong types, unknown keys).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Well-formed input that violates a model invariant (cycle, dangling id, ...).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Estimation could not proceed on the supplied data.
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Power flow did not reach tolerance within the iteration budget.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double final_mismatch, int iterations)
        : std::runtime_error(what), mismatch_(final_mismatch), iterations_(iterations) {}

    double final_mismatch() const noexcept { return mismatch_; }
    int iterations() const noexcept { return iterations_; }

private:
    double mismatch_;
    int iterations_;
};

}  // namespace gridsynth
