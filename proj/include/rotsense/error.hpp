#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rotsense {

/// Invalid user input: a bad parameter value, config key or geometry.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A formula evaluated outside the regime it was derived for.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The integrated state became non-finite.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double time, std::int64_t trajectory = -1)
        : std::runtime_error(what), time_(time), trajectory_(trajectory) {}

    double time() const noexcept { return time_; }
    std::int64_t trajectory() const noexcept { return trajectory_; }

private:
    double time_;
    std::int64_t trajectory_;
};

} // namespace rotsense
