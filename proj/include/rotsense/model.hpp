#pragma once

#include <cmath>
#include <string>

#include "rotsense/error.hpp"
#include "rotsense/units.hpp"

namespace rotsense {

/// Physical constants of the ring-cavity Hamiltonian. All rates in rad/ms.
struct ModelParams {
    double omega = two_pi_khz(10.0);     ///< effective cavity detuning
    double kappa = two_pi_khz(5.0);      ///< cavity loss rate
    double hop_j = two_pi_khz(2.0);      ///< tunnelling energy
    double n_atoms = 60000.0;            ///< total atom number (real-valued)
    int n_sites = 4;                     ///< ring length, multiple of 4
    double omega_rec = two_pi_khz(3.5);  ///< recoil frequency

    /// Throws ConfigError naming the first violated constraint.
    void validate() const {
        auto fail = [](const std::string& msg) { throw ConfigError(msg); };
        if (!(omega > 0.0) || !std::isfinite(omega)) fail("omega must be positive");
        if (!(kappa >= 0.0) || !std::isfinite(kappa)) fail("kappa must be non-negative");
        if (!(hop_j > 0.0) || !std::isfinite(hop_j)) fail("J must be positive");
        if (!(n_atoms > 0.0) || !std::isfinite(n_atoms)) fail("N_atoms must be positive");
        if (!(omega_rec > 0.0) || !std::isfinite(omega_rec)) fail("omega_rec must be positive");
        if (n_sites < 4 || n_sites % 4 != 0)
            fail("M = " + std::to_string(n_sites) + " is unsupported: M must be a multiple of 4 and at least 4");
    }

    ModelParams with_atoms(double n) const {
        ModelParams p = *this;
        p.n_atoms = n;
        return p;
    }
};

/// Number of sites along each side of the square ring, M/4 + 1.
inline int sites_per_side(int n_sites) {
    if (n_sites < 4 || n_sites % 4 != 0)
        throw ConfigError("sites_per_side: M = " + std::to_string(n_sites) +
                          " is not a square ring (M must be a multiple of 4)");
    return n_sites / 4 + 1;
}

/// Gauge phase picked up per bond for a rotation at angular frequency omega_rot (rad/ms).
inline double theta_from_rotation(double omega_rot, const ModelParams& params) {
    params.validate();
    return kPi * kPi * sites_per_side(params.n_sites) * omega_rot / params.omega_rec;
}

inline double rotation_from_theta(double theta, const ModelParams& params) {
    params.validate();
    return theta * params.omega_rec / (kPi * kPi * sites_per_side(params.n_sites));
}

namespace detail {
inline double checked_cos(double theta, const char* who) {
    const double c = std::cos(theta);
    if (c < 0.0)
        throw DomainError(std::string(who) + ": cos(theta) < 0 for theta = " + std::to_string(theta) +
                          "; the superradiant boundary is only defined for cos(theta) >= 0");
    return c;
}
} // namespace detail

/// Superradiant threshold of the open system,
/// g_crit = sqrt(J cos(theta) (omega^2 + kappa^2) / (N omega)).
inline double critical_coupling(const ModelParams& params, double theta) {
    params.validate();
    const double c = detail::checked_cos(theta, "critical_coupling");
    const auto& p = params;
    return std::sqrt(p.hop_j * c * (p.omega * p.omega + p.kappa * p.kappa) / (p.n_atoms * p.omega));
}

/// g_crit(theta) / g_crit(0) = sqrt(cos(theta)).
inline double boundary_curve(double theta) {
    return std::sqrt(detail::checked_cos(theta, "boundary_curve"));
}

} // namespace rotsense
