#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rotsense/config.hpp"
#include "rotsense/ensemble.hpp"
#include "rotsense/meanfield.hpp"
#include "rotsense/spectrum.hpp"
#include "rotsense/sweep.hpp"
#include "rotsense/version.hpp"

namespace rotsense {

using MetadataEntries = std::vector<std::pair<std::string, std::string>>;

/// Comment block at the head of every output file: version, command, the resolved
/// configuration and any derived quantities.
inline void write_metadata(std::ostream& os, const RunConfig& cfg, std::string_view command,
                           const MetadataEntries& derived = {}) {
    os << "# rotsense " << kVersion << "\n";
    os << "# command = " << command << "\n";
    os << "# units: rates in 2pi*kHz, angles in units of pi, times in ms\n";
    for (const auto& [k, v] : resolved_settings(cfg)) os << "# " << k << " = " << v << "\n";
    for (const auto& [k, v] : derived) os << "# derived." << k << " = " << v << "\n";
}

inline std::string csv_number(double v) { return detail::format_number(v); }

/// Single trajectory viewed as a one-member ensemble (standard deviations are zero).
inline EnsembleSeries as_series(const TrajectorySeries& traj) {
    EnsembleSeries s;
    s.times = traj.times;
    s.mean_photon = traj.photon;
    s.std_photon.assign(traj.size(), 0.0);
    s.mean_imbalance = traj.imbalance;
    s.std_imbalance.assign(traj.size(), 0.0);
    s.mean_atoms = traj.atoms;
    s.theta_trace = traj.theta;
    s.g_trace = traj.g;
    s.n_traj = 1;
    return s;
}

inline const std::vector<std::string>& series_columns() {
    static const std::vector<std::string> cols{"t_ms",         "theta_rad",      "g_rel",          "mean_photon",
                                               "std_photon",   "mean_imbalance", "std_imbalance",  "mean_atoms"};
    return cols;
}

/// g_rel is g(t) / g0_crit.
inline void write_series_csv(std::ostream& os, const EnsembleSeries& s, double g0_crit) {
    const auto& cols = series_columns();
    for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
    os << "\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        os << csv_number(s.times[i]) << ',' << csv_number(s.theta_trace[i]) << ',' << csv_number(s.g_trace[i] / g0_crit)
           << ',' << csv_number(s.mean_photon[i]) << ',' << csv_number(s.std_photon[i]) << ','
           << csv_number(s.mean_imbalance[i]) << ',' << csv_number(s.std_imbalance[i]) << ','
           << csv_number(s.mean_atoms[i]) << "\n";
    }
}

inline nlohmann::json series_json(const EnsembleSeries& s, double g0_crit, const RunConfig& cfg,
                                  std::string_view command, const MetadataEntries& derived = {}) {
    nlohmann::json meta;
    meta["version"] = kVersion;
    meta["command"] = command;
    meta["seed"] = cfg.seed;
    meta["n_traj"] = s.n_traj;
    meta["dt_ms"] = cfg.integrator.dt;
    meta["params"] = {{"omega_2pikHz", from_rad_per_ms(cfg.params.omega, FrequencyUnit::TwoPiKilohertz)},
                      {"kappa_2pikHz", from_rad_per_ms(cfg.params.kappa, FrequencyUnit::TwoPiKilohertz)},
                      {"J_2pikHz", from_rad_per_ms(cfg.params.hop_j, FrequencyUnit::TwoPiKilohertz)},
                      {"N_atoms", cfg.params.n_atoms},
                      {"M", cfg.params.n_sites},
                      {"omega_rec_2pikHz", from_rad_per_ms(cfg.params.omega_rec, FrequencyUnit::TwoPiKilohertz)}};
    nlohmann::json config = nlohmann::json::object();
    for (const auto& [k, v] : resolved_settings(cfg)) config[k] = v;
    meta["config"] = config;
    for (const auto& [k, v] : derived) meta["derived"][k] = v;

    std::vector<double> g_rel(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) g_rel[i] = s.g_trace[i] / g0_crit;
    nlohmann::json j;
    j["metadata"] = meta;
    j["t_ms"] = s.times;
    j["theta_rad"] = s.theta_trace;
    j["g_rel"] = g_rel;
    j["mean_photon"] = s.mean_photon;
    j["std_photon"] = s.std_photon;
    j["mean_imbalance"] = s.mean_imbalance;
    j["std_imbalance"] = s.std_imbalance;
    j["mean_atoms"] = s.mean_atoms;
    return j;
}

/// Frequencies written in 2π×kHz.
inline void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumPoint>& spectrum) {
    os << "freq_2pikHz,magnitude\n";
    for (const auto& p : spectrum)
        os << csv_number(from_rad_per_ms(p.frequency, FrequencyUnit::TwoPiKilohertz)) << ',' << csv_number(p.magnitude)
           << "\n";
}

inline void write_phase_diagram_csv(std::ostream& os, const PhaseDiagram& pd) {
    os << "theta_rad,g_rel,photon_steady,is_sr,converged\n";
    for (std::size_t i = 0; i < pd.n_theta(); ++i)
        for (std::size_t j = 0; j < pd.n_g(); ++j) {
            const auto k = pd.index(i, j);
            os << csv_number(pd.grid.theta_values[i]) << ',' << csv_number(pd.grid.g_rel_values[j]) << ','
               << csv_number(pd.photon_steady[k]) << ',' << (pd.is_sr[k] ? 1 : 0) << ',' << (pd.converged[k] ? 1 : 0)
               << "\n";
        }
}

inline void write_boundary_csv(std::ostream& os, const PhaseDiagram& pd) {
    os << "theta_rad,g_rel_crit\n";
    for (const auto& [theta, g] : pd.boundary_analytic) os << csv_number(theta) << ',' << csv_number(g) << "\n";
}

struct MeanFieldRow {
    double theta;
    double g_rel;
    MeanFieldPoint point;
};

inline void write_meanfield_csv(std::ostream& os, const std::vector<MeanFieldRow>& rows) {
    os << "theta_rad,g_rel,delta_opt,alpha_re,alpha_im,photon\n";
    for (const auto& r : rows)
        os << csv_number(r.theta) << ',' << csv_number(r.g_rel) << ',' << csv_number(r.point.delta) << ','
           << csv_number(r.point.alpha.real()) << ',' << csv_number(r.point.alpha.imag()) << ','
           << csv_number(std::norm(r.point.alpha)) << "\n";
}

} // namespace rotsense
