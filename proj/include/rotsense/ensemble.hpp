#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rotsense/dynamics.hpp"
#include "rotsense/parallel.hpp"

namespace rotsense {

/// Supplies the atom number of a trajectory from its noise stream.
using AtomSampler = std::function<double(const NoiseStream&)>;

inline AtomSampler constant_atoms(double n) {
    return [n](const NoiseStream&) { return n; };
}

/// Final-time facts about one trajectory of an ensemble.
struct TrajectorySummary {
    std::uint64_t index = 0;
    double atoms_drawn = 0.0;
    cplx final_cavity{};
    double final_imbalance = 0.0;
    double max_atom_drift = 0.0;
};

/// Per-time ensemble statistics. Standard deviations use the n - 1 normalisation.
struct EnsembleSeries {
    std::vector<double> times;
    std::vector<double> mean_photon, std_photon;
    std::vector<double> mean_imbalance, std_imbalance;
    std::vector<double> mean_atoms;
    std::vector<double> theta_trace, g_trace;
    int n_traj = 0;
    std::vector<TrajectorySummary> trajectories;

    std::size_t size() const { return times.size(); }

    double max_atom_drift() const {
        double d = 0.0;
        for (const auto& t : trajectories) d = std::max(d, t.max_atom_drift);
        return d;
    }
};

struct EnsembleOptions {
    AtomSampler atoms;              ///< empty: constant N_atoms
    bool identical_streams = false; ///< every trajectory reuses stream 0 (degenerate ensembles)
    Execution exec;
};

namespace detail {

// Running mean and second central moment for one observable over the time grid.
struct MomentAccumulator {
    double count = 0.0;
    std::vector<double> mean, m2;

    void add(const std::vector<double>& x) {
        if (mean.empty()) {
            mean.assign(x.size(), 0.0);
            m2.assign(x.size(), 0.0);
        }
        count += 1.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - mean[i];
            mean[i] += d / count;
            m2[i] += d * (x[i] - mean[i]);
        }
    }

    // Chan et al. pairwise combination.
    void merge(const MomentAccumulator& other) {
        if (other.count == 0.0) return;
        if (count == 0.0) {
            *this = other;
            return;
        }
        const double n = count + other.count;
        for (std::size_t i = 0; i < mean.size(); ++i) {
            const double d = other.mean[i] - mean[i];
            mean[i] += d * other.count / n;
            m2[i] += other.m2[i] + d * d * count * other.count / n;
        }
        count = n;
    }

    std::vector<double> stddev() const {
        std::vector<double> s(m2.size(), 0.0);
        if (count < 2.0) return s;
        for (std::size_t i = 0; i < m2.size(); ++i) s[i] = std::sqrt(std::max(0.0, m2[i] / (count - 1.0)));
        return s;
    }
};

struct BlockResult {
    MomentAccumulator photon, imbalance, atoms;
    std::vector<double> times, g, theta;
    std::vector<TrajectorySummary> summaries;
    std::string error;
    std::size_t failures = 0;
};

inline constexpr std::size_t kBlockSize = 16;

} // namespace detail

/// Runs n_traj independent TWA trajectories and reduces them to per-time mean and
/// standard deviation. Trajectories are grouped in fixed blocks of 16 that are merged
/// in index order, so the result is bit-identical for any thread count.
inline EnsembleSeries run_ensemble(const Schedule& schedule, const ModelParams& params, const IntegratorConfig& config,
                                   int n_traj, std::uint64_t seed, const EnsembleOptions& options = {}) {
    params.validate();
    if (n_traj < 2) throw ConfigError("an ensemble needs n_traj >= 2, got " + std::to_string(n_traj));
    config.validate(params, schedule.g_max(), params.n_atoms);
    const AtomSampler sampler = options.atoms ? options.atoms : constant_atoms(params.n_atoms);

    const auto total = static_cast<std::size_t>(n_traj);
    const std::size_t n_blocks = (total + detail::kBlockSize - 1) / detail::kBlockSize;
    std::vector<detail::BlockResult> blocks(n_blocks);

    parallel_for(n_blocks, options.exec, [&](std::size_t b) {
        auto& block = blocks[b];
        const std::size_t first = b * detail::kBlockSize;
        const std::size_t last = std::min(total, first + detail::kBlockSize);
        for (std::size_t i = first; i < last; ++i) {
            const NoiseStream stream{seed, options.identical_streams ? 0 : static_cast<std::uint64_t>(i)};
            TrajectorySummary summary;
            summary.index = i;
            try {
                summary.atoms_drawn = sampler(stream);
                auto traj = integrate_trajectory(schedule, params, config, stream, summary.atoms_drawn);
                block.photon.add(traj.photon);
                block.imbalance.add(traj.imbalance);
                block.atoms.add(traj.atoms);
                if (block.times.empty()) {
                    block.times = traj.times;
                    block.g = traj.g;
                    block.theta = traj.theta;
                }
                summary.final_cavity = traj.final_state.cavity;
                summary.final_imbalance = traj.final_state.imbalance();
                summary.max_atom_drift = traj.max_atom_drift;
            } catch (const NumericalError& e) {
                if (block.failures++ == 0) block.error = e.what();
                summary.max_atom_drift = std::nan("");
            }
            block.summaries.push_back(summary);
        }
    });

    detail::MomentAccumulator photon, imbalance, atoms;
    EnsembleSeries out;
    out.n_traj = n_traj;
    out.trajectories.reserve(total);
    std::size_t failures = 0;
    std::string first_error;
    for (auto& block : blocks) {
        if (block.failures > 0 && failures == 0) first_error = block.error;
        failures += block.failures;
        photon.merge(block.photon);
        imbalance.merge(block.imbalance);
        atoms.merge(block.atoms);
        if (out.times.empty() && !block.times.empty()) {
            out.times = std::move(block.times);
            out.g_trace = std::move(block.g);
            out.theta_trace = std::move(block.theta);
        }
        for (auto& s : block.summaries) out.trajectories.push_back(s);
    }
    if (failures > 0)
        throw NumericalError("ensemble failed: " + std::to_string(failures) + " of " + std::to_string(n_traj) +
                                 " trajectories became non-finite; first: " + first_error,
                             std::nan(""));

    out.mean_photon = photon.mean;
    out.std_photon = photon.stddev();
    out.mean_imbalance = imbalance.mean;
    out.std_imbalance = imbalance.stddev();
    out.mean_atoms = atoms.mean;
    return out;
}

} // namespace rotsense
