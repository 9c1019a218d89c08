#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rotsense/ensemble.hpp"
#include "rotsense/model.hpp"
#include "rotsense/rng.hpp"
#include "rotsense/spectrum.hpp"

namespace rotsense {

struct SteadyState {
    double photon = 0.0;       ///< tail time-average of the ensemble-mean photon number
    bool converged = true;
    double first_half = 0.0;
    double second_half = 0.0;
};

/// Averages mean_photon over the tail. The point is flagged unconverged when the two
/// halves of the tail differ by more than 20% and by more than three combined
/// standard errors.
inline SteadyState detect_steady_state(const EnsembleSeries& series, TimeWindow tail) {
    const double mid = 0.5 * (tail.begin + tail.end);
    double sum[2] = {0.0, 0.0}, sd[2] = {0.0, 0.0};
    int count[2] = {0, 0};
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double t = series.times[i];
        if (t < tail.begin || t > tail.end) continue;
        const int h = t < mid ? 0 : 1;
        sum[h] += series.mean_photon[i];
        sd[h] += series.std_photon[i];
        ++count[h];
    }
    if (count[0] == 0 || count[1] == 0)
        throw ConfigError("detect_steady_state: tail window [" + std::to_string(tail.begin) + ", " +
                          std::to_string(tail.end) + "] ms does not cover the series");
    SteadyState out;
    out.first_half = sum[0] / count[0];
    out.second_half = sum[1] / count[1];
    out.photon = (sum[0] + sum[1]) / (count[0] + count[1]);
    const double n = std::max(1, series.n_traj);
    const double se0 = sd[0] / count[0] / std::sqrt(n), se1 = sd[1] / count[1] / std::sqrt(n);
    const double diff = std::abs(out.first_half - out.second_half);
    const double scale = std::max(std::abs(out.first_half), std::abs(out.second_half));
    out.converged = !(diff > 0.2 * scale && diff > 3.0 * std::hypot(se0, se1));
    return out;
}

enum class Phase { Normal, Superradiant };

inline constexpr double kDefaultSrThreshold = 10.0;

inline Phase classify(double photon_steady, double sr_threshold = kDefaultSrThreshold) {
    return photon_steady > sr_threshold ? Phase::Superradiant : Phase::Normal;
}

inline std::vector<double> linspace(double first, double last, int n) {
    if (n < 1) throw ConfigError("linspace: need at least one point");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? first : first + (last - first) * i / (n - 1);
    return v;
}

/// Axes and per-point run settings of a phase-diagram sweep.
struct GridSpec {
    std::vector<double> theta_values;  ///< rad, in [0, pi/2)
    std::vector<double> g_rel_values;  ///< g / g_crit(0)
    int n_traj = 100;
    double t_end = 30.0;               ///< ms
    double tail = 5.0;                 ///< length of the averaging window ending at t_end, ms
    std::uint64_t seed = 1;
    double sr_threshold = kDefaultSrThreshold;
    IntegratorConfig integrator;

    TimeWindow tail_window() const { return {t_end - tail, t_end}; }

    void validate() const {
        auto fail = [](const std::string& msg) { throw ConfigError("sweep grid: " + msg); };
        auto increasing = [](const std::vector<double>& v) {
            for (std::size_t i = 1; i < v.size(); ++i)
                if (!(v[i] > v[i - 1])) return false;
            return !v.empty();
        };
        if (!increasing(theta_values)) fail("theta axis must be non-empty and strictly increasing");
        if (!increasing(g_rel_values)) fail("g_rel axis must be non-empty and strictly increasing");
        if (theta_values.front() < 0.0 || theta_values.back() >= kPi / 2.0) fail("theta values must lie in [0, pi/2)");
        if (g_rel_values.front() < 0.0) fail("g_rel values must be non-negative");
        if (n_traj < 2) fail("n_traj must be at least 2");
        if (!(tail > 0.0 && tail < t_end)) fail("tail window must lie inside (0, t_end]");
    }
};

struct PhaseDiagram {
    GridSpec grid;
    std::vector<double> photon_steady;  ///< row-major [theta][g_rel]
    std::vector<bool> is_sr;
    std::vector<bool> converged;
    std::vector<std::string> failure;   ///< non-empty where the point's ensemble failed
    std::vector<std::pair<double, double>> boundary_analytic;  ///< (theta, sqrt(cos theta))

    std::size_t n_theta() const { return grid.theta_values.size(); }
    std::size_t n_g() const { return grid.g_rel_values.size(); }
    std::size_t index(std::size_t i_theta, std::size_t j_g) const { return i_theta * n_g() + j_g; }

    /// Midpoint of the g_rel pair where a theta column flips from NP to SR, using the
    /// first SR point above the last NP point. Empty when the column does not flip.
    std::optional<double> empirical_boundary(std::size_t i_theta) const {
        std::optional<std::size_t> last_np;
        for (std::size_t j = 0; j < n_g(); ++j)
            if (!is_sr[index(i_theta, j)]) last_np = j;
        if (!last_np || *last_np + 1 >= n_g()) return std::nullopt;
        const auto& g = grid.g_rel_values;
        return 0.5 * (g[*last_np] + g[*last_np + 1]);
    }
};

/// Runs one ensemble per grid point with constant controls and classifies the steady state.
/// Grid points run in parallel, each with its own seed derived from the master seed and
/// the point index; failed points are recorded and the sweep continues.
inline PhaseDiagram sweep_phase_diagram(const GridSpec& grid, const ModelParams& params, Execution exec = {}) {
    grid.validate();
    params.validate();
    const double g0 = critical_coupling(params, 0.0);
    IntegratorConfig integ = grid.integrator;
    integ.t_end = grid.t_end;
    integ.validate(params, grid.g_rel_values.back() * g0, params.n_atoms);

    PhaseDiagram pd;
    pd.grid = grid;
    const std::size_t n = grid.theta_values.size() * grid.g_rel_values.size();
    pd.photon_steady.assign(n, std::nan(""));
    pd.is_sr.assign(n, false);
    pd.converged.assign(n, false);
    pd.failure.assign(n, {});
    for (double theta : grid.theta_values) pd.boundary_analytic.emplace_back(theta, boundary_curve(theta));

    struct PointResult {
        SteadyState steady;
        std::string failure;
    };
    std::vector<PointResult> results(n);
    parallel_for(n, exec, [&](std::size_t k) {
        const double theta = grid.theta_values[k / grid.g_rel_values.size()];
        const double g_rel = grid.g_rel_values[k % grid.g_rel_values.size()];
        EnsembleOptions options;
        options.exec.threads = 1;
        try {
            const auto series = run_ensemble(Schedule::constant(g_rel * g0, theta), params, integ, grid.n_traj,
                                             mix_seed(grid.seed, k), options);
            results[k].steady = detect_steady_state(series, grid.tail_window());
        } catch (const NumericalError& e) {
            results[k].failure = e.what();
        }
    });
    for (std::size_t k = 0; k < n; ++k) {
        if (!results[k].failure.empty()) {
            pd.failure[k] = results[k].failure;
            continue;
        }
        pd.photon_steady[k] = results[k].steady.photon;
        pd.converged[k] = results[k].steady.converged;
        pd.is_sr[k] = classify(results[k].steady.photon, grid.sr_threshold) == Phase::Superradiant;
    }
    return pd;
}

} // namespace rotsense
