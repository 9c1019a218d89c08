#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rotsense/dynamics.hpp"
#include "rotsense/model.hpp"
#include "rotsense/protocols.hpp"
#include "rotsense/sweep.hpp"

namespace rotsense {

enum class OutputFormat { Csv, Json };

/// Settings of the `trajectory` and `ensemble` commands.
struct EnsembleSettings {
    double g_rel = 1.2;
    double theta = 0.0;           ///< rad
    double t_end = 15.0;          ///< ms
    double tail = 5.0;            ///< ms, averaging window for the summary (clamped to the run)
    int n_traj = 1000;
    bool noiseless = false;       ///< trajectory only: deterministic run from a seeded symmetric state
    double seed_imbalance = 1e-3; ///< relative imbalance of the noiseless start
};

struct SweepSettings {
    double theta_min = 0.0;
    double theta_max = 1.45;      ///< rad
    int n_theta = 12;
    double g_rel_min = 0.6;
    double g_rel_max = 1.4;
    int n_g = 12;
    int n_traj = 100;
    double t_end = 30.0;
    double tail = 5.0;
    double sr_threshold = kDefaultSrThreshold;
};

struct MeanFieldSettings {
    std::vector<double> theta{0.0};  ///< rad
    std::vector<double> g_rel{0.5, 0.9, 1.0, 1.05, 1.09, 1.1, 1.2, 1.5, 2.0};
};

/// Fully resolved run configuration. Defaults are the base parameter set with
/// omega = 2π×10 kHz.
struct RunConfig {
    ModelParams params;
    std::uint64_t seed = 1;
    unsigned threads = 0;  ///< 0 = auto
    OutputFormat format = OutputFormat::Csv;
    std::string output = "rotsense";
    IntegratorConfig integrator;
    SensingConfig sensing;
    double sigma_rel = 0.0;  ///< shot-to-shot atom number spread sigma / N; 0 disables
    EnsembleSettings ensemble;
    SweepSettings sweep;
    MeanFieldSettings meanfield;

    Execution execution() const { return Execution{threads}; }

    GridSpec grid() const {
        GridSpec g;
        g.theta_values = linspace(sweep.theta_min, sweep.theta_max, sweep.n_theta);
        g.g_rel_values = linspace(sweep.g_rel_min, sweep.g_rel_max, sweep.n_g);
        g.n_traj = sweep.n_traj;
        g.t_end = sweep.t_end;
        g.tail = sweep.tail;
        g.seed = seed;
        g.sr_threshold = sweep.sr_threshold;
        g.integrator = integrator;
        return g;
    }

    FluctuationConfig fluctuation() const { return {params.n_atoms, sigma_rel * params.n_atoms}; }
};

namespace detail {

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline double parse_number(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v))
        throw ConfigError(key + ": expected a number, got '" + text + "'");
    return v;
}

inline long long parse_integer(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ConfigError(key + ": expected an integer, got '" + text + "'");
    return v;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(key, item));
    if (out.empty()) throw ConfigError(key + ": expected a comma-separated list of numbers");
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

inline std::string join(const std::vector<double>& v, double scale = 1.0) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i] * scale);
    return s;
}

struct KeySpec {
    std::string name;
    bool echo;  ///< included in output metadata
    std::function<void(RunConfig&, const std::string& key, const std::string& value)> set;
    std::function<std::string(const RunConfig&)> get;
};

inline void require(bool ok, const std::string& key, const std::string& constraint) {
    if (!ok) throw ConfigError(key + ": " + constraint);
}

// A rate quoted in 2π×kHz, sanity-bounded to (0, 1e3] (or [0, 1e3] when zero is allowed).
inline KeySpec rate_key(std::string name, double ModelParams::*field, bool allow_zero = false) {
    return {name, true,
            [field, allow_zero](RunConfig& c, const std::string& k, const std::string& v) {
                const double x = parse_number(k, v);
                require(allow_zero ? x >= 0.0 : x > 0.0, k, allow_zero ? "must be non-negative" : "must be positive");
                require(x <= 1e3, k, "implausibly large (rates are in units of 2π×kHz, expected <= 1000)");
                c.params.*field = two_pi_khz(x);
            },
            [field](const RunConfig& c) { return format_number(from_rad_per_ms(c.params.*field, FrequencyUnit::TwoPiKilohertz)); }};
}

template <class T>
KeySpec number_key(std::string name, T RunConfig::*group, double T::*field, std::function<bool(double)> ok,
                   std::string constraint, double scale = 1.0) {
    return {name, true,
            [=](RunConfig& c, const std::string& k, const std::string& v) {
                const double x = parse_number(k, v);
                require(ok(x), k, constraint);
                (c.*group).*field = x * scale;
            },
            [=](const RunConfig& c) { return format_number((c.*group).*field / scale); }};
}

template <class T>
KeySpec int_key(std::string name, T RunConfig::*group, int T::*field, int min) {
    return {name, true,
            [=](RunConfig& c, const std::string& k, const std::string& v) {
                const auto x = parse_integer(k, v);
                require(x >= min && x <= 100000000, k, "must be an integer >= " + std::to_string(min));
                (c.*group).*field = static_cast<int>(x);
            },
            [=](const RunConfig& c) { return std::to_string((c.*group).*field); }};
}

inline const std::vector<KeySpec>& key_table() {
    static const std::vector<KeySpec> table = [] {
        auto positive = [](double x) { return x > 0.0; };
        auto non_negative = [](double x) { return x >= 0.0; };
        auto any = [](double) { return true; };
        std::vector<KeySpec> t;
        // [model]
        t.push_back(rate_key("model.omega", &ModelParams::omega));
        t.push_back(rate_key("model.kappa", &ModelParams::kappa, true));
        t.push_back(rate_key("model.J", &ModelParams::hop_j));
        t.push_back(number_key("model.N_atoms", &RunConfig::params, &ModelParams::n_atoms, positive, "must be positive"));
        t.push_back({"model.M", true,
                     [](RunConfig& c, const std::string& k, const std::string& v) {
                         const auto m = parse_integer(k, v);
                         require(m >= 4 && m % 4 == 0 && m <= 4096, k,
                                 "M = " + std::to_string(m) + " violates M mod 4 == 0 (square ring, M >= 4)");
                         c.params.n_sites = static_cast<int>(m);
                     },
                     [](const RunConfig& c) { return std::to_string(c.params.n_sites); }});
        t.push_back(rate_key("model.omega_rec", &ModelParams::omega_rec));
        // [run]
        t.push_back({"run.seed", true,
                     [](RunConfig& c, const std::string& k, const std::string& v) {
                         const std::string s = trim(v);
                         std::uint64_t x = 0;
                         const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
                         require(ec == std::errc() && ptr == s.data() + s.size() && !s.empty(), k,
                                 "expected an unsigned 64-bit integer, got '" + v + "'");
                         c.seed = x;
                     },
                     [](const RunConfig& c) { return std::to_string(c.seed); }});
        t.push_back({"run.threads", false,
                     [](RunConfig& c, const std::string& k, const std::string& v) {
                         if (trim(v) == "auto") {
                             c.threads = 0;
                             return;
                         }
                         const auto x = parse_integer(k, v);
                         require(x >= 1 && x <= 4096, k, "must be 'auto' or a positive integer");
                         c.threads = static_cast<unsigned>(x);
                     },
                     [](const RunConfig& c) { return c.threads == 0 ? std::string("auto") : std::to_string(c.threads); }});
        t.push_back({"run.format", true,
                     [](RunConfig& c, const std::string& k, const std::string& v) {
                         const std::string s = trim(v);
                         require(s == "csv" || s == "json", k, "must be csv or json");
                         c.format = s == "csv" ? OutputFormat::Csv : OutputFormat::Json;
                     },
                     [](const RunConfig& c) { return std::string(c.format == OutputFormat::Csv ? "csv" : "json"); }});
        t.push_back({"run.output", false,
                     [](RunConfig& c, const std::string& k, const std::string& v) {
                         require(!trim(v).empty(), k, "must not be empty");
                         c.output = trim(v);
                     },
                     [](const RunConfig& c) { return c.output; }});
        t.push_back(number_key("run.dt", &RunConfig::integrator, &IntegratorConfig::dt, positive, "must be positive (ms)"));
        t.push_back(int_key("run.record_every", &RunConfig::integrator, &IntegratorConfig::record_every, 1));
        // [sense]; angles as fractions of pi, drive frequency in 2π×kHz
        t.push_back(number_key("sense.theta0", &RunConfig::sensing, &SensingConfig::theta0, any, "", kPi));
        t.push_back(number_key("sense.delta_theta", &RunConfig::sensing, &SensingConfig::delta_theta, non_negative,
                               "must be non-negative", kPi));
        t.push_back(number_key("sense.omega_drive", &RunConfig::sensing, &SensingConfig::omega_drive,
                               [](double x) { return x > 0.0 && x <= 1e3; }, "must lie in (0, 1000] (2π×kHz)", kTwoPi));
        t.push_back(number_key("sense.g_rel", &RunConfig::sensing, &SensingConfig::g_final_rel, non_negative, "must be non-negative"));
        t.push_back(number_key("sense.t_ramp", &RunConfig::sensing, &SensingConfig::t_ramp, non_negative, "must be non-negative (ms)"));
        t.push_back(number_key("sense.t0", &RunConfig::sensing, &SensingConfig::t0, non_negative, "must be non-negative (ms)"));
        t.push_back(number_key("sense.t_end", &RunConfig::sensing, &SensingConfig::t_end, positive, "must be positive (ms)"));
        t.push_back(number_key("sense.t_settle", &RunConfig::sensing, &SensingConfig::t_settle, non_negative, "must be non-negative (ms)"));
        t.push_back(int_key("sense.n_traj", &RunConfig::sensing, &SensingConfig::n_traj, 2));
        t.push_back({"sense.sigma", true,
                     [](RunConfig& c, const std::string& k, const std::string& v) {
                         const double x = parse_number(k, v);
                         require(x >= 0.0 && x <= 1.0, k, "relative atom-number spread must lie in [0, 1]");
                         c.sigma_rel = x;
                     },
                     [](const RunConfig& c) { return format_number(c.sigma_rel); }});
        // [ensemble]
        t.push_back(number_key("ensemble.g_rel", &RunConfig::ensemble, &EnsembleSettings::g_rel, non_negative, "must be non-negative"));
        t.push_back(number_key("ensemble.theta", &RunConfig::ensemble, &EnsembleSettings::theta, any, "", kPi));
        t.push_back(number_key("ensemble.t_end", &RunConfig::ensemble, &EnsembleSettings::t_end, positive, "must be positive (ms)"));
        t.push_back(number_key("ensemble.tail", &RunConfig::ensemble, &EnsembleSettings::tail, positive, "must be positive (ms)"));
        t.push_back(int_key("ensemble.n_traj", &RunConfig::ensemble, &EnsembleSettings::n_traj, 2));
        t.push_back({"ensemble.noiseless", true,
                     [](RunConfig& c, const std::string& k, const std::string& v) { c.ensemble.noiseless = parse_bool(k, v); },
                     [](const RunConfig& c) { return std::string(c.ensemble.noiseless ? "true" : "false"); }});
        t.push_back(number_key("ensemble.seed_imbalance", &RunConfig::ensemble, &EnsembleSettings::seed_imbalance,
                               [](double x) { return x >= 0.0 && x < 1.0; }, "must lie in [0, 1)"));
        // [sweep]
        t.push_back(number_key("sweep.theta_min", &RunConfig::sweep, &SweepSettings::theta_min, non_negative, "must be non-negative", kPi));
        t.push_back(number_key("sweep.theta_max", &RunConfig::sweep, &SweepSettings::theta_max,
                               [](double x) { return x >= 0.0 && x < 0.5; }, "must lie in [0, 0.5) (fractions of pi)", kPi));
        t.push_back(int_key("sweep.n_theta", &RunConfig::sweep, &SweepSettings::n_theta, 1));
        t.push_back(number_key("sweep.g_rel_min", &RunConfig::sweep, &SweepSettings::g_rel_min, non_negative, "must be non-negative"));
        t.push_back(number_key("sweep.g_rel_max", &RunConfig::sweep, &SweepSettings::g_rel_max, non_negative, "must be non-negative"));
        t.push_back(int_key("sweep.n_g", &RunConfig::sweep, &SweepSettings::n_g, 1));
        t.push_back(int_key("sweep.n_traj", &RunConfig::sweep, &SweepSettings::n_traj, 2));
        t.push_back(number_key("sweep.t_end", &RunConfig::sweep, &SweepSettings::t_end, positive, "must be positive (ms)"));
        t.push_back(number_key("sweep.tail", &RunConfig::sweep, &SweepSettings::tail, positive, "must be positive (ms)"));
        t.push_back(number_key("sweep.sr_threshold", &RunConfig::sweep, &SweepSettings::sr_threshold, non_negative, "must be non-negative"));
        // [meanfield]
        t.push_back({"meanfield.theta", true,
                     [](RunConfig& c, const std::string& k, const std::string& v) {
                         auto list = parse_list(k, v);
                         for (auto& x : list) x *= kPi;
                         c.meanfield.theta = std::move(list);
                     },
                     [](const RunConfig& c) { return join(c.meanfield.theta, 1.0 / kPi); }});
        t.push_back({"meanfield.g_rel", true,
                     [](RunConfig& c, const std::string& k, const std::string& v) {
                         auto list = parse_list(k, v);
                         for (double x : list) require(x >= 0.0, k, "values must be non-negative");
                         c.meanfield.g_rel = std::move(list);
                     },
                     [](const RunConfig& c) { return join(c.meanfield.g_rel); }});
        return t;
    }();
    return table;
}

inline void apply(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& spec : key_table()) {
        if (spec.name == key) {
            spec.set(cfg, key, value);
            return;
        }
    }
    throw ConfigError("unknown configuration key '" + key + "'");
}

inline void validate(const RunConfig& cfg) {
    auto wrap = [](const char* section, auto&& check) {
        try {
            check();
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("[") + section + "] " + e.what());
        } catch (const DomainError& e) {
            throw ConfigError(std::string("[") + section + "] " + e.what());
        }
    };
    wrap("model", [&] { cfg.params.validate(); });
    wrap("sense", [&] { cfg.sensing.validate(); });
    wrap("sweep", [&] {
        require(cfg.sweep.theta_max >= cfg.sweep.theta_min, "sweep.theta_max", "must not be below sweep.theta_min");
        require(cfg.sweep.g_rel_max >= cfg.sweep.g_rel_min, "sweep.g_rel_max", "must not be below sweep.g_rel_min");
        if (cfg.sweep.n_theta > 1 || cfg.sweep.n_g > 1) {
            require(cfg.sweep.n_theta == 1 || cfg.sweep.theta_max > cfg.sweep.theta_min, "sweep.theta_max",
                    "must exceed sweep.theta_min when n_theta > 1");
            require(cfg.sweep.n_g == 1 || cfg.sweep.g_rel_max > cfg.sweep.g_rel_min, "sweep.g_rel_max",
                    "must exceed sweep.g_rel_min when n_g > 1");
        }
        cfg.grid().validate();
    });
    wrap("ensemble", [&] {
        require(std::cos(cfg.ensemble.theta) >= 0.0, "ensemble.theta", "must satisfy cos(theta) >= 0");
    });
    wrap("meanfield", [&] {
        for (double th : cfg.meanfield.theta)
            require(std::cos(th) >= 0.0, "meanfield.theta", "values must satisfy cos(theta) >= 0");
    });
}

} // namespace detail

/// Ordered "section.key" = value overrides, applied after the file; later entries win.
using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

/// Parses INI-style text ("[section]" headers, "key = value" lines, ';' comments).
inline RunConfig parse_config_text(const std::string& text, const ConfigOverrides& overrides = {}) {
    RunConfig cfg;
    if (!text.empty()) {
        boost::property_tree::ptree tree;
        std::istringstream in(text);
        try {
            boost::property_tree::ini_parser::read_ini(in, tree);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw ConfigError("config file line " + std::to_string(e.line()) + ": " + e.message());
        }
        for (const auto& [section, body] : tree) {
            if (!body.data().empty())
                throw ConfigError("key '" + section + "' appears outside a [section]");
            for (const auto& [key, value] : body) detail::apply(cfg, section + "." + key, value.data());
        }
    }
    for (const auto& [key, value] : overrides) detail::apply(cfg, key, value);
    detail::validate(cfg);
    return cfg;
}

inline RunConfig parse_config(const std::optional<std::filesystem::path>& file, const ConfigOverrides& overrides = {}) {
    std::string text;
    if (file) {
        std::ifstream in(*file);
        if (!in) throw ConfigError("cannot open config file '" + file->string() + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    return parse_config_text(text, overrides);
}

/// The configuration as ordered "section.key" / value pairs in file units.
/// Execution-only settings (thread count, output path) are left out so that output
/// metadata does not depend on them.
inline std::vector<std::pair<std::string, std::string>> resolved_settings(const RunConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& spec : detail::key_table())
        if (spec.echo) out.emplace_back(spec.name, spec.get(cfg));
    return out;
}

} // namespace rotsense
