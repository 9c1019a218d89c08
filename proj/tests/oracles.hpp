#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "rotsense/dynamics.hpp"
#include "rotsense/meanfield.hpp"
#include "rotsense/model.hpp"

namespace rotsense::oracle {

/// Closed-form SR imbalance N sqrt(1 - (g_crit/g)^4), zero below threshold.
inline double closed_form_imbalance(double theta, double g, const ModelParams& p) {
    const double gc = critical_coupling(p, theta);
    if (g <= gc) return 0.0;
    const double r = gc / g;
    return p.n_atoms * std::sqrt(1.0 - r * r * r * r);
}

/// g^2 Delta^2 / (omega^2 + kappa^2) for the closed-form imbalance.
inline double closed_form_photon(double theta, double g, const ModelParams& p) {
    const double d = closed_form_imbalance(theta, g, p);
    return g * g * d * d / (p.omega * p.omega + p.kappa * p.kappa);
}

/// Exhaustive grid minimisation of the raw variational energy with alpha pinned to
/// i g Delta / (kappa + i omega); returns the minimising Delta >= 0.
inline double brute_force_imbalance(double theta, double g, const ModelParams& p, double step_fraction = 1e-4) {
    const auto n_points = static_cast<long>(std::llround(1.0 / step_fraction));
    double best_delta = 0.0;
    double best_energy = energy({}, 0.0, theta, g, p);
    for (long i = 1; i <= n_points; ++i) {
        const double delta = p.n_atoms * static_cast<double>(i) / static_cast<double>(n_points);
        const std::complex<double> alpha = std::complex<double>(0.0, g * delta) / std::complex<double>(p.kappa, p.omega);
        const double e = energy(alpha, delta, theta, g, p);
        if (e < best_energy) {
            best_energy = e;
            best_delta = delta;
        }
    }
    return best_delta;
}

/// Eigenvalues (ascending) of the Hermitian single-particle hopping matrix of the
/// ring, A_{j,j+1} = J e^{i theta}, A_{j,j-1} = J e^{-i theta}, for which db/dt = i A b.
inline std::vector<double> ring_hopping_spectrum(int m, double hop_j, double theta) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
        a(j, (j + 1) % m) += std::polar(hop_j, theta);
        a(j, (j + m - 1) % m) += std::polar(hop_j, -theta);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a);
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

/// Stationary <|alpha|^2> of d alpha = -(kappa + i omega) alpha dt + dxi with
/// <dxi* dxi> = kappa dt: each quadrature has variance (kappa/2)/(2 kappa) = 1/4.
inline constexpr double kOrnsteinUhlenbeckPhoton = 0.5;

/// Time-averaged photon number of a noiseless run over its last `tail` ms.
inline double noiseless_steady_photon(double theta, double g, const ModelParams& p, double t_end, double tail,
                                      double seed_imbalance = 1e-3) {
    IntegratorConfig cfg;
    cfg.t_end = t_end;
    cfg.record_every = 20;
    const auto traj = integrate_deterministic(symmetric_seed_state(p, seed_imbalance), Schedule::constant(g, theta), p, cfg);
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < traj.size(); ++i)
        if (traj.times[i] >= t_end - tail) {
            sum += traj.photon[i];
            ++n;
        }
    return sum / n;
}

/// SR onset located by bisection on the noiseless dynamics: the smallest g whose
/// steady photon number exceeds `threshold`, searched in [lo, hi] to relative width tol.
inline double bisect_onset(double theta, const ModelParams& p, double lo, double hi, double tol = 1e-3,
                           double t_end = 40.0, double threshold = 1.0) {
    while ((hi - lo) > tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (noiseless_steady_photon(theta, mid, p, t_end, 5.0) > threshold)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace rotsense::oracle
