#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "rotsense/error.hpp"
#include "rotsense/model.hpp"

namespace rotsense {

/// A point of the coherent-state ansatz: imbalance, cavity amplitude and its energy.
struct MeanFieldPoint {
    double delta = 0.0;
    std::complex<double> alpha{};
    double energy = 0.0;
};

/// Variational energy of the product of coherent states,
/// E = omega |alpha|^2 - 2 g Re(alpha) Delta - 2 J cos(theta) sqrt(N^2 - Delta^2).
inline double energy(std::complex<double> alpha, double delta, double theta, double g, const ModelParams& params) {
    const double n = params.n_atoms;
    if (std::abs(delta) > n)
        throw ConfigError("energy: |Delta| = " + std::to_string(std::abs(delta)) + " exceeds N_atoms = " +
                          std::to_string(n));
    return params.omega * std::norm(alpha) - 2.0 * g * alpha.real() * delta -
           2.0 * params.hop_j * std::cos(theta) * std::sqrt(n * n - delta * delta);
}

/// Stationary cavity amplitude for a frozen imbalance, alpha = i g Delta / (kappa + i omega).
inline std::complex<double> dissipative_cavity_amplitude(double delta, double g, const ModelParams& params) {
    using namespace std::complex_literals;
    return 1i * g * delta / std::complex<double>(params.kappa, params.omega);
}

namespace detail {

// Energy per atom relative to the normal phase with alpha pinned to its dissipative
// value, as a function of x = Delta/N. Algebraically identical to
// (energy(alpha(Delta), Delta) - energy(0, 0)) / N but written without the
// cancellation that hides the quartic minimum at threshold.
struct ReducedEnergy {
    double hopping;  // J cos(theta)
    double cavity;   // g^2 N omega / (omega^2 + kappa^2)

    double operator()(double x) const {
        const double x2 = x * x;
        const double s = std::sqrt(std::max(0.0, 1.0 - x2));
        return x2 * (2.0 * hopping / (1.0 + s) - cavity);
    }
};

template <class F>
double golden_section_min(F&& f, double lo, double hi, double tol) {
    constexpr double r = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace detail

/// Global minimiser of the ansatz energy with the cavity adiabatically eliminated.
///
/// Searches Delta in [0, N] (the Delta >= 0 member of the Z2 pair) on a coarse grid of
/// 1000 points and refines the best cell by golden-section search to 1e-6 N. Below
/// threshold the normal phase Delta = 0, alpha = 0 is returned exactly.
inline MeanFieldPoint minimize_energy(double theta, double g, const ModelParams& params) {
    params.validate();
    const double cos_theta = detail::checked_cos(theta, "minimize_energy");
    const auto& p = params;
    const detail::ReducedEnergy f{p.hop_j * cos_theta, g * g * p.n_atoms * p.omega / (p.omega * p.omega + p.kappa * p.kappa)};

    constexpr int grid_points = 1000;
    int best = 0;
    double best_value = f(0.0);
    for (int i = 1; i < grid_points; ++i) {
        const double v = f(static_cast<double>(i) / (grid_points - 1));
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }
    const double step = 1.0 / (grid_points - 1);
    const double lo = std::max(0.0, (best - 1) * step);
    const double hi = std::min(1.0, (best + 1) * step);
    double x = detail::golden_section_min(f, lo, hi, 1e-6);
    if (!(f(x) < 0.0)) x = 0.0;

    MeanFieldPoint point;
    point.delta = x * p.n_atoms;
    point.alpha = x > 0.0 ? dissipative_cavity_amplitude(point.delta, g, p) : std::complex<double>{};
    point.energy = energy(point.alpha, point.delta, theta, g, p);
    return point;
}

/// Mean-field intracavity photon number |alpha|^2; zero in the normal phase.
inline double predict_photon_number(double theta, double g, const ModelParams& params) {
    return std::norm(minimize_energy(theta, g, params).alpha);
}

} // namespace rotsense
