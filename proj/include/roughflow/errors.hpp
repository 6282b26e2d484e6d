#pragma once

#include <stdexcept>
#include <string>

namespace roughflow {

/// A numerical guard (resolution, step size, sample count) was violated.
class GuardError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Mollifier support does not cover enough grid cells.
class ResolutionError : public GuardError {
public:
    ResolutionError(const std::string& what, double min_eps) : GuardError(what), min_eps_(min_eps) {}
    double min_admissible_eps() const noexcept { return min_eps_; }

private:
    double min_eps_;
};

/// Time step too large for the characteristic tracer.
class StepSizeError : public GuardError {
public:
    StepSizeError(const std::string& what, double suggested_dt) : GuardError(what), suggested_(suggested_dt) {}
    double suggested_dt() const noexcept { return suggested_; }

private:
    double suggested_;
};

}  // namespace roughflow
