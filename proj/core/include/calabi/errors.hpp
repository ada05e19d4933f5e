#pragma once

#include <stdexcept>
#include <string>

namespace calabi {

// Invalid run configuration or malformed input (bad grid size, unknown
// config key, unreadable snapshot header, ...).  CLI maps this to exit 3.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Two fields/potentials that must live on the same grid do not.
class GridMismatch : public std::invalid_argument {
public:
    explicit GridMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// The Hessian of a symplectic potential failed the positivity margin, either
// on construction-time validation or mid-flow.  Carries the offending
// eigenvalue so callers can report how badly positivity failed.
class InadmissibleMetric : public std::runtime_error {
public:
    InadmissibleMetric(const std::string& what, double min_eigenvalue)
        : std::runtime_error(what), min_eigenvalue_(min_eigenvalue) {}

    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

// A trace directory on disk is missing pieces or fails internal consistency.
class TraceIoError : public std::runtime_error {
public:
    explicit TraceIoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace calabi
