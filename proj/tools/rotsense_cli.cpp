// Command-line front end: rotsense <meanfield|trajectory|ensemble|sweep|sense> [options]

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rotsense/cli.hpp"

namespace {

using rotsense::ConfigOverrides;

// Registers a flag whose value is forwarded verbatim as a config override.
void forward(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help,
             ConfigOverrides& overrides) {
    app->add_option_function<std::string>(
        flag, [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); }, help);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semiclassical simulator of a rotation-sensing atom-cavity ring"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(rotsense::kVersion));

    std::optional<std::string> config_file;
    std::vector<std::string> sets;
    ConfigOverrides flags;

    app.add_option("-c,--config", config_file, "INI-style configuration file")->check(CLI::ExistingFile);
    app.add_option("--set", sets, "override any key: section.key=value (repeatable)");
    forward(&app, "--seed", "run.seed", "master seed", flags);
    forward(&app, "--threads", "run.threads", "worker threads or 'auto' (env ROTSENSE_THREADS)", flags);
    forward(&app, "--format", "run.format", "timeseries output format: csv or json", flags);
    forward(&app, "-o,--output", "run.output", "output path prefix", flags);

    auto* meanfield = app.add_subcommand("meanfield", "mean-field optimum over a theta x g_rel table");
    forward(meanfield, "--theta", "meanfield.theta", "comma-separated phases, fractions of pi", flags);
    forward(meanfield, "--g-rel", "meanfield.g_rel", "comma-separated couplings g/g0_crit", flags);

    auto* trajectory = app.add_subcommand("trajectory", "single TWA (or noiseless) trajectory at constant controls");
    auto* ensemble = app.add_subcommand("ensemble", "TWA ensemble at constant controls");
    for (auto* sub : {trajectory, ensemble}) {
        forward(sub, "--g-rel", "ensemble.g_rel", "coupling g/g0_crit", flags);
        forward(sub, "--theta", "ensemble.theta", "gauge phase, fraction of pi", flags);
        forward(sub, "--t-end", "ensemble.t_end", "duration in ms", flags);
    }
    forward(ensemble, "--n-traj", "ensemble.n_traj", "number of trajectories", flags);
    trajectory->add_flag_function(
        "--noiseless", [&flags](std::int64_t) { flags.emplace_back("ensemble.noiseless", "true"); },
        "deterministic run from a seeded symmetric state");

    auto* sweep = app.add_subcommand("sweep", "phase diagram over (theta, g_rel)");
    forward(sweep, "--n-traj", "sweep.n_traj", "trajectories per grid point", flags);
    forward(sweep, "--n-theta", "sweep.n_theta", "theta grid size", flags);
    forward(sweep, "--n-g", "sweep.n_g", "g_rel grid size", flags);
    forward(sweep, "--t-end", "sweep.t_end", "per-point duration in ms", flags);

    auto* sense = app.add_subcommand("sense", "rotation-sensing protocol with spectral readout");
    forward(sense, "--theta0", "sense.theta0", "bias phase, fraction of pi", flags);
    forward(sense, "--delta-theta", "sense.delta_theta", "drive amplitude, fraction of pi", flags);
    forward(sense, "--omega-drive", "sense.omega_drive", "drive frequency in 2pi*kHz", flags);
    forward(sense, "--g-rel", "sense.g_rel", "final coupling g/g0_crit", flags);
    forward(sense, "--n-traj", "sense.n_traj", "number of trajectories", flags);
    forward(sense, "--sigma", "sense.sigma", "relative shot-to-shot atom-number spread (0 = off)", flags);
    forward(sense, "--t-end", "sense.t_end", "duration in ms", flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << rotsense::error_record("usage", e.what()) << "\n";
        return rotsense::kExitUsage;
    }

    rotsense::RunConfig cfg;
    rotsense::Command command{};
    try {
        ConfigOverrides overrides;
        if (const char* env = std::getenv("ROTSENSE_THREADS"); env != nullptr && *env != '\0')
            overrides.emplace_back("run.threads", env);
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw rotsense::ConfigError("--set expects section.key=value, got '" + s + "'");
            overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
        }
        overrides.insert(overrides.end(), flags.begin(), flags.end());
        cfg = rotsense::parse_config(config_file, overrides);
        command = *rotsense::parse_command(app.get_subcommands().front()->get_name());
    } catch (const std::exception& e) {
        std::cerr << rotsense::error_record("usage", e.what()) << "\n";
        return rotsense::kExitUsage;
    }

    try {
        const auto result = rotsense::dispatch(command, cfg);
        std::cout << result.summary << "\n";
        return EXIT_SUCCESS;
    } catch (const rotsense::ConfigError& e) {
        std::cerr << rotsense::error_record("usage", e.what()) << "\n";
        return rotsense::kExitUsage;
    } catch (const rotsense::DomainError& e) {
        std::cerr << rotsense::error_record("usage", e.what()) << "\n";
        return rotsense::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << rotsense::error_record("runtime", e.what()) << "\n";
        return rotsense::kExitRuntime;
    }
}
