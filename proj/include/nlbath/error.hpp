#pragma once

#include <stdexcept>
#include <string>

namespace nlbath {

/// A parameter violates its documented domain.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A requested ensemble does not fit the configured memory budget.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Master-equation integration left the space of valid states.
class IntegrationFailure : public std::runtime_error {
public:
    IntegrationFailure(const std::string& what, double time)
        : std::runtime_error(what + " at t=" + std::to_string(time)), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

/// A coherence series never decayed far enough to fit a rate.
class InsufficientDecay : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace nlbath
