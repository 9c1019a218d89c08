#pragma once

#include <cmath>

namespace rotsense {

/// Time-dependent controls g(t) and theta(t).
///
/// g ramps linearly from 0 to g_final over [0, t_ramp]; theta ramps from 0 to theta0
/// over the same interval and from t0 on carries theta0 + delta_theta sin(omega_drive (t - t0)).
/// A zero-length ramp gives constant controls from t = 0.
struct Schedule {
    double g_final = 0.0;      ///< rad/ms
    double t_ramp = 0.0;       ///< ms
    double theta0 = 0.0;       ///< rad
    double t0 = 0.0;           ///< drive start, ms
    double delta_theta = 0.0;  ///< rad
    double omega_drive = 0.0;  ///< rad/ms

    static Schedule constant(double g, double theta) {
        Schedule s;
        s.g_final = g;
        s.theta0 = theta;
        return s;
    }

    double ramp_fraction(double t) const {
        if (t_ramp <= 0.0 || t >= t_ramp) return 1.0;
        return t <= 0.0 ? 0.0 : t / t_ramp;
    }

    double g(double t) const { return g_final * ramp_fraction(t); }

    double theta(double t) const {
        double value = theta0 * ramp_fraction(t);
        if (delta_theta != 0.0 && t >= t0) value += delta_theta * std::sin(omega_drive * (t - t0));
        return value;
    }

    double g_max() const { return std::abs(g_final); }
};

} // namespace rotsense
