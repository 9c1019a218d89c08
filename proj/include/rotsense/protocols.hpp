#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "rotsense/ensemble.hpp"
#include "rotsense/model.hpp"
#include "rotsense/schedule.hpp"

namespace rotsense {

/// Rotation-sensing run: ramp g and the bias phase, let the system settle, then modulate theta.
struct SensingConfig {
    double theta0 = 0.0;                        ///< bias phase, rad
    double delta_theta = kPi / 20.0;            ///< drive amplitude, rad
    double omega_drive = two_pi_khz(0.5);       ///< rad/ms
    double g_final_rel = 1.09;                  ///< g / g_crit(theta = 0)
    double t_ramp = 1.0;                        ///< ms
    double t0 = 3.0;                            ///< drive start, ms
    double t_end = 20.0;                        ///< ms
    double t_settle = 1.0;                      ///< delay between t0 and the spectrum window, ms
    int n_traj = 1000;

    void validate() const {
        auto fail = [](const std::string& msg) { throw ConfigError("sensing config: " + msg); };
        if (!(t_ramp >= 0.0)) fail("t_ramp must be non-negative");
        if (!(t_ramp <= t0 && t0 <= t_end)) fail("requires t_ramp <= t0 <= t_end");
        if (!(delta_theta >= 0.0)) fail("delta_theta must be non-negative");
        if (!(std::abs(theta0) + delta_theta < kPi / 2.0)) fail("|theta0| + delta_theta must stay below pi/2");
        if (delta_theta > 0.0 && !(omega_drive > 0.0)) fail("omega_drive must be positive");
        if (!(g_final_rel >= 0.0)) fail("g_rel must be non-negative");
        if (!(t_settle >= 0.0)) fail("t_settle must be non-negative");
        if (n_traj < 2) fail("n_traj must be at least 2");
    }

    /// Interval analysed by response_spectrum, [t0 + t_settle, t_end).
    std::pair<double, double> spectrum_window() const { return {t0 + t_settle, t_end}; }
};

/// Shot-to-shot Gaussian atom number, truncated below at 0.1 mean_atoms.
struct FluctuationConfig {
    double mean_atoms = 40000.0;
    double sigma_atoms = 4000.0;

    void validate() const {
        if (!(mean_atoms > 0.0)) throw ConfigError("fluctuation config: mean_atoms must be positive");
        if (!(sigma_atoms >= 0.0)) throw ConfigError("fluctuation config: sigma_atoms must be non-negative");
    }

    double draw(std::mt19937_64& engine) const {
        if (sigma_atoms == 0.0) return mean_atoms;
        std::normal_distribution<double> normal(mean_atoms, sigma_atoms);
        const double floor = 0.1 * mean_atoms;
        for (;;) {
            const double n = normal(engine);
            if (n >= floor) return n;
        }
    }

    AtomSampler sampler() const {
        return [cfg = *this](const NoiseStream& stream) {
            auto engine = stream.engine(StreamPurpose::AtomNumber);
            return cfg.draw(engine);
        };
    }
};

inline Schedule build_sensing_schedule(const SensingConfig& cfg, const ModelParams& params) {
    cfg.validate();
    Schedule s;
    s.g_final = cfg.g_final_rel * critical_coupling(params, 0.0);
    s.t_ramp = cfg.t_ramp;
    s.theta0 = cfg.theta0;
    s.t0 = cfg.t0;
    s.delta_theta = cfg.delta_theta;
    s.omega_drive = cfg.omega_drive;
    return s;
}

inline EnsembleSeries run_sensing(const SensingConfig& cfg, const ModelParams& params, IntegratorConfig integ,
                                  std::uint64_t seed, Execution exec = {}) {
    const Schedule schedule = build_sensing_schedule(cfg, params);
    integ.t_end = cfg.t_end;
    EnsembleOptions options;
    options.exec = exec;
    return run_ensemble(schedule, params, integ, cfg.n_traj, seed, options);
}

/// Sensing run with a fresh atom number per trajectory. The coupling is calibrated
/// once against the nominal mean_atoms.
inline EnsembleSeries run_sensing_with_fluctuations(const SensingConfig& cfg, const FluctuationConfig& fluct,
                                                    const ModelParams& params, IntegratorConfig integ,
                                                    std::uint64_t seed, Execution exec = {}) {
    fluct.validate();
    const ModelParams nominal = params.with_atoms(fluct.mean_atoms);
    const Schedule schedule = build_sensing_schedule(cfg, nominal);
    integ.t_end = cfg.t_end;
    EnsembleOptions options;
    options.exec = exec;
    options.atoms = fluct.sampler();
    return run_ensemble(schedule, nominal, integ, cfg.n_traj, seed, options);
}

} // namespace rotsense
