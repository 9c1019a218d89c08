#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rotsense/protocols.hpp"

namespace rotsense {
namespace {

const ModelParams kParams{};

TEST(SensingConfig, DefaultsAndWindow) {
    const SensingConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_DOUBLE_EQ(cfg.delta_theta, kPi / 20.0);
    EXPECT_DOUBLE_EQ(cfg.omega_drive, kTwoPi * 0.5);
    const auto [b, e] = cfg.spectrum_window();
    EXPECT_EQ(b, 4.0);
    EXPECT_EQ(e, 20.0);
    // the window holds a whole number of drive periods
    const double periods = (e - b) * cfg.omega_drive / kTwoPi;
    EXPECT_NEAR(periods, std::round(periods), 1e-12);
    EXPECT_GE(periods, 8.0);
}

TEST(SensingConfig, Validation) {
    auto bad = [](auto mutate) {
        SensingConfig c;
        mutate(c);
        EXPECT_THROW(c.validate(), ConfigError);
    };
    bad([](SensingConfig& c) { c.t0 = 0.5; });
    bad([](SensingConfig& c) { c.t_end = 2.0; });
    bad([](SensingConfig& c) { c.theta0 = 1.5; });
    bad([](SensingConfig& c) { c.delta_theta = -0.1; });
    bad([](SensingConfig& c) { c.omega_drive = 0.0; });
    bad([](SensingConfig& c) { c.n_traj = 1; });
    bad([](SensingConfig& c) { c.g_final_rel = -1.0; });
}

TEST(BuildSensingSchedule, Shape) {
    SensingConfig cfg;
    cfg.theta0 = kPi / 4.0;
    const auto s = build_sensing_schedule(cfg, kParams);
    const double g0 = critical_coupling(kParams, 0.0);
    EXPECT_NEAR(s.g(0.5), 0.5 * 1.09 * g0, 1e-15);
    EXPECT_NEAR(s.g(10.0), 1.09 * g0, 1e-15);
    EXPECT_NEAR(s.theta(0.5), kPi / 8.0, 1e-15);
    EXPECT_DOUBLE_EQ(s.theta(2.9), kPi / 4.0);
    EXPECT_NEAR(s.theta(3.5), kPi / 4.0 + kPi / 20.0, 1e-12);
    EXPECT_NEAR(s.theta(4.0), kPi / 4.0, 1e-12);
    EXPECT_NEAR(s.theta(4.5), kPi / 4.0 - kPi / 20.0, 1e-12);
}

TEST(FluctuationConfig, DrawStatistics) {
    const FluctuationConfig f{40000.0, 4000.0};
    std::mt19937_64 rng(8);
    const int n = 40000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = f.draw(rng);
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    EXPECT_NEAR(mean, 40000.0, 100.0);
    EXPECT_NEAR(std::sqrt(sum2 / n - mean * mean), 4000.0, 100.0);
}

TEST(FluctuationConfig, TruncationAndZeroSpread) {
    const FluctuationConfig wide{1000.0, 2000.0};
    std::mt19937_64 rng(9);
    for (int i = 0; i < 5000; ++i) EXPECT_GE(wide.draw(rng), 100.0);
    const FluctuationConfig fixed{1234.0, 0.0};
    EXPECT_EQ(fixed.draw(rng), 1234.0);
    EXPECT_THROW((FluctuationConfig{0.0, 1.0}.validate()), ConfigError);
    EXPECT_THROW((FluctuationConfig{1.0, -1.0}.validate()), ConfigError);
}

TEST(FluctuationConfig, SamplerIsPerStream) {
    const auto sampler = FluctuationConfig{40000.0, 4000.0}.sampler();
    EXPECT_EQ(sampler(NoiseStream{1, 2}), sampler(NoiseStream{1, 2}));
    EXPECT_NE(sampler(NoiseStream{1, 2}), sampler(NoiseStream{1, 3}));
}

TEST(RunSensing, TracesFollowSchedule) {
    SensingConfig cfg;
    cfg.n_traj = 4;
    cfg.t_end = 4.0;
    const auto s = run_sensing(cfg, kParams, IntegratorConfig{}, 1);
    const auto sched = build_sensing_schedule(cfg, kParams);
    ASSERT_EQ(s.size(), 401u);
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_EQ(s.theta_trace[i], sched.theta(s.times[i]));
        EXPECT_EQ(s.g_trace[i], sched.g(s.times[i]));
    }
    EXPECT_EQ(s.n_traj, 4);
}

TEST(RunSensing, ZeroSpreadEqualsFixedAtomNumber) {
    SensingConfig cfg;
    cfg.n_traj = 3;
    cfg.t_end = 3.5;
    const auto fluct = run_sensing_with_fluctuations(cfg, {40000.0, 0.0}, kParams, IntegratorConfig{}, 6);
    const auto fixed = run_sensing(cfg, kParams.with_atoms(40000.0), IntegratorConfig{}, 6);
    EXPECT_EQ(fluct.mean_photon, fixed.mean_photon);
    EXPECT_EQ(fluct.std_photon, fixed.std_photon);
    EXPECT_EQ(fluct.mean_atoms, fixed.mean_atoms);
}

TEST(RunSensing, FluctuatingAtomNumbers) {
    SensingConfig cfg;
    cfg.n_traj = 6;
    cfg.t_end = 3.0;
    const FluctuationConfig f{40000.0, 4000.0};
    const auto s = run_sensing_with_fluctuations(cfg, f, kParams, IntegratorConfig{}, 1);
    // calibrated against the nominal atom number
    const double g0_nominal = critical_coupling(kParams.with_atoms(40000.0), 0.0);
    EXPECT_NEAR(s.g_trace.back() / g0_nominal, 1.09, 1e-12);
    double lo = 1e9, hi = 0.0;
    for (const auto& t : s.trajectories) {
        lo = std::min(lo, t.atoms_drawn);
        hi = std::max(hi, t.atoms_drawn);
        EXPECT_LT(t.max_atom_drift, 1e-8);
    }
    EXPECT_LT(lo, hi);
    const auto again = run_sensing_with_fluctuations(cfg, f, kParams, IntegratorConfig{}, 1);
    EXPECT_EQ(s.mean_photon, again.mean_photon);
}

} // namespace
} // namespace rotsense
