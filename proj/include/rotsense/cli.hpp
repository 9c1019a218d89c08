#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rotsense/config.hpp"
#include "rotsense/dynamics.hpp"
#include "rotsense/ensemble.hpp"
#include "rotsense/meanfield.hpp"
#include "rotsense/output.hpp"
#include "rotsense/protocols.hpp"
#include "rotsense/spectrum.hpp"
#include "rotsense/sweep.hpp"

namespace rotsense {

enum class Command { MeanField, Trajectory, Ensemble, Sweep, Sense };

inline std::optional<Command> parse_command(std::string_view name) {
    if (name == "meanfield") return Command::MeanField;
    if (name == "trajectory") return Command::Trajectory;
    if (name == "ensemble") return Command::Ensemble;
    if (name == "sweep") return Command::Sweep;
    if (name == "sense") return Command::Sense;
    return std::nullopt;
}

inline std::string_view command_name(Command c) {
    switch (c) {
    case Command::MeanField: return "meanfield";
    case Command::Trajectory: return "trajectory";
    case Command::Ensemble: return "ensemble";
    case Command::Sweep: return "sweep";
    case Command::Sense: return "sense";
    }
    return "unknown";
}

/// Exit codes: usage errors (bad config or flags) and runtime failures (numerics, I/O).
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

/// One-line machine-readable error record.
inline std::string error_record(std::string_view error_class, std::string_view message) {
    nlohmann::json j;
    j["error"] = {{"class", error_class}, {"message", message}};
    return j.dump();
}

struct DispatchResult {
    std::vector<std::filesystem::path> files;
    std::string summary;
};

namespace detail {

inline std::filesystem::path output_path(const RunConfig& cfg, std::string_view suffix) {
    return std::filesystem::path(cfg.output + "_" + std::string(suffix));
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file '" + path.string() + "'");
    writer(os);
    if (!os) throw std::runtime_error("failed writing output file '" + path.string() + "'");
}

inline double tail_mean(const EnsembleSeries& s, double begin) {
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s.times[i] >= begin) {
            sum += s.mean_photon[i];
            ++n;
        }
    return n > 0 ? sum / n : std::nan("");
}

inline std::filesystem::path write_series(const RunConfig& cfg, std::string_view command, std::string_view stem,
                                          const EnsembleSeries& series, double g0, const MetadataEntries& derived) {
    if (cfg.format == OutputFormat::Json) {
        auto path = output_path(cfg, std::string(stem) + ".json");
        write_file(path, [&](std::ostream& os) { os << series_json(series, g0, cfg, command, derived).dump(1) << "\n"; });
        return path;
    }
    auto path = output_path(cfg, std::string(stem) + ".csv");
    write_file(path, [&](std::ostream& os) {
        write_metadata(os, cfg, command, derived);
        write_series_csv(os, series, g0);
    });
    return path;
}

} // namespace detail

/// Runs one subcommand and writes its output files under cfg.output.
/// Throws ConfigError for usage problems and NumericalError / std::runtime_error otherwise.
inline DispatchResult dispatch(Command command, const RunConfig& cfg) {
    const std::string_view name = command_name(command);
    const double g0 = critical_coupling(cfg.params, 0.0);
    const MetadataEntries derived{{"g0_crit_2pikHz", detail::format_number(from_rad_per_ms(g0, FrequencyUnit::TwoPiKilohertz))}};
    DispatchResult result;
    std::ostringstream summary;

    switch (command) {
    case Command::MeanField: {
        std::vector<MeanFieldRow> rows;
        for (double theta : cfg.meanfield.theta)
            for (double g_rel : cfg.meanfield.g_rel) rows.push_back({theta, g_rel, minimize_energy(theta, g_rel * g0, cfg.params)});
        auto path = detail::output_path(cfg, "meanfield.csv");
        detail::write_file(path, [&](std::ostream& os) {
            write_metadata(os, cfg, name, derived);
            write_meanfield_csv(os, rows);
        });
        result.files.push_back(path);
        summary << "meanfield: " << rows.size() << " points, g0_crit = " << detail::format_number(from_rad_per_ms(g0, FrequencyUnit::TwoPiKilohertz))
                << " 2pi*kHz";
        break;
    }
    case Command::Trajectory:
    case Command::Ensemble: {
        const auto& e = cfg.ensemble;
        IntegratorConfig integ = cfg.integrator;
        integ.t_end = e.t_end;
        const Schedule schedule = Schedule::constant(e.g_rel * g0, e.theta);
        EnsembleSeries series;
        if (command == Command::Trajectory) {
            const auto traj = e.noiseless
                                  ? integrate_deterministic(symmetric_seed_state(cfg.params, e.seed_imbalance), schedule, cfg.params, integ)
                                  : integrate_trajectory(schedule, cfg.params, integ, NoiseStream{cfg.seed, 0}, cfg.params.n_atoms);
            series = as_series(traj);
        } else {
            EnsembleOptions options;
            options.exec = cfg.execution();
            series = run_ensemble(schedule, cfg.params, integ, e.n_traj, cfg.seed, options);
        }
        result.files.push_back(detail::write_series(cfg, name, name, series, g0, derived));
        summary << name << ": tail mean photon = " << detail::format_number(detail::tail_mean(series, std::max(0.0, e.t_end - e.tail)))
                << " (mean-field " << detail::format_number(predict_photon_number(e.theta, e.g_rel * g0, cfg.params)) << ")";
        break;
    }
    case Command::Sense: {
        const auto& s = cfg.sensing;
        const EnsembleSeries series =
            cfg.sigma_rel > 0.0
                ? run_sensing_with_fluctuations(s, cfg.fluctuation(), cfg.params, cfg.integrator, cfg.seed, cfg.execution())
                : run_sensing(s, cfg.params, cfg.integrator, cfg.seed, cfg.execution());
        const auto [begin, end] = s.spectrum_window();
        const auto spectrum = response_spectrum(series, {begin, end}, s.omega_drive);
        result.files.push_back(detail::write_series(cfg, name, "timeseries", series, g0, derived));
        auto spath = detail::output_path(cfg, "spectrum.csv");
        detail::write_file(spath, [&](std::ostream& os) {
            write_metadata(os, cfg, name, derived);
            write_spectrum_csv(os, spectrum);
        });
        result.files.push_back(spath);
        const double f_dom = dominant_frequency(spectrum);
        summary << "sense: dominant response at " << detail::format_number(from_rad_per_ms(f_dom, FrequencyUnit::TwoPiKilohertz))
                << " 2pi*kHz (" << detail::format_number(f_dom / s.omega_drive) << " x drive), tail mean photon = "
                << detail::format_number(detail::tail_mean(series, begin));
        break;
    }
    case Command::Sweep: {
        const auto pd = sweep_phase_diagram(cfg.grid(), cfg.params, cfg.execution());
        auto ppath = detail::output_path(cfg, "phase_diagram.csv");
        detail::write_file(ppath, [&](std::ostream& os) {
            write_metadata(os, cfg, name, derived);
            write_phase_diagram_csv(os, pd);
        });
        auto bpath = detail::output_path(cfg, "boundary.csv");
        detail::write_file(bpath, [&](std::ostream& os) {
            write_metadata(os, cfg, name, derived);
            write_boundary_csv(os, pd);
        });
        result.files = {ppath, bpath};
        std::size_t n_sr = 0, n_unconverged = 0, n_failed = 0;
        for (std::size_t k = 0; k < pd.photon_steady.size(); ++k) {
            n_sr += pd.is_sr[k];
            n_unconverged += !pd.converged[k] && pd.failure[k].empty();
            n_failed += !pd.failure[k].empty();
        }
        summary << "sweep: " << pd.photon_steady.size() << " points, " << n_sr << " SR, " << n_unconverged
                << " unconverged, " << n_failed << " failed";
        if (const auto b = pd.empirical_boundary(0))
            summary << "; boundary at theta = " << detail::format_number(pd.grid.theta_values[0]) << ": g_rel ~ "
                    << detail::format_number(*b);
        break;
    }
    }
    result.summary = summary.str();
    return result;
}

} // namespace rotsense
