#pragma once

#include <numbers>

namespace rotsense {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Frequencies are stored internally in rad/ms; time is in ms.
/// Configuration values are quoted in units of 2π×kHz.
enum class FrequencyUnit { TwoPiKilohertz, RadPerMs };

constexpr double to_rad_per_ms(double value, FrequencyUnit unit) {
    return unit == FrequencyUnit::TwoPiKilohertz ? value * kTwoPi : value;
}

constexpr double from_rad_per_ms(double value, FrequencyUnit unit) {
    return unit == FrequencyUnit::TwoPiKilohertz ? value / kTwoPi : value;
}

/// Shorthand for a value given in 2π×kHz.
constexpr double two_pi_khz(double value) { return to_rad_per_ms(value, FrequencyUnit::TwoPiKilohertz); }

} // namespace rotsense
