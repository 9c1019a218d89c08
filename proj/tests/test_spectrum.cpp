#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rotsense/spectrum.hpp"

namespace rotsense {
namespace {

constexpr double kDrive = kTwoPi * 0.5;  // rad/ms

struct Signal {
    std::vector<double> t, y;
};

template <class F>
Signal sample(F f, double t_end = 20.0, double dt = 0.01) {
    Signal s;
    const auto n = static_cast<int>(std::llround(t_end / dt));
    for (int i = 0; i <= n; ++i) {
        s.t.push_back(i * dt);
        s.y.push_back(f(i * dt));
    }
    return s;
}

TEST(ResponseSpectrum, PureToneAmplitude) {
    const auto s = sample([](double t) { return 5.0 + 2.0 * std::sin(kDrive * (t - 3.0)); });
    const auto spec = response_spectrum(s.t, s.y, {4.0, 20.0}, kDrive);
    EXPECT_EQ(spec.size(), 801u);
    EXPECT_NEAR(spec[1].frequency, kTwoPi / 16.0, 1e-12);
    EXPECT_NEAR(dominant_frequency(spec), kDrive, 1e-12);
    EXPECT_NEAR(magnitude_at(spec, kDrive), 2.0, 1e-9);
    EXPECT_LT(spec[0].magnitude, 1e-9);
    EXPECT_LT(magnitude_at(spec, 2.0 * kDrive), 1e-9);
}

TEST(ResponseSpectrum, SquaredDriveDoublesFrequency) {
    // response quadratic in a symmetric modulation
    const auto s = sample([](double t) {
        const double x = std::sin(kDrive * (t - 3.0));
        return 100.0 + 7.0 * x * x;
    });
    const auto spec = response_spectrum(s.t, s.y, {4.0, 20.0}, kDrive);
    EXPECT_NEAR(dominant_frequency(spec), 2.0 * kDrive, 1e-12);
    EXPECT_NEAR(magnitude_at(spec, 2.0 * kDrive), 3.5, 1e-9);
    EXPECT_LT(magnitude_at(spec, kDrive), 1e-9);
}

TEST(ResponseSpectrum, LinearInInput) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> normal;
    auto a = sample([&](double) { return normal(rng); });
    auto b = sample([&](double) { return normal(rng); });
    std::vector<double> sum(a.y.size());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = a.y[i] - 3.0 * b.y[i];
    const auto sa = response_spectrum(a.t, a.y, {4.0, 20.0}, kDrive);
    const auto sb = response_spectrum(a.t, b.y, {4.0, 20.0}, kDrive);
    const auto ss = response_spectrum(a.t, sum, {4.0, 20.0}, kDrive);
    for (std::size_t k = 0; k < ss.size(); ++k) EXPECT_LE(ss[k].magnitude, sa[k].magnitude + 3.0 * sb[k].magnitude + 1e-12);
    auto scaled = a.y;
    for (auto& v : scaled) v *= 4.0;
    const auto s4 = response_spectrum(a.t, scaled, {4.0, 20.0}, kDrive);
    for (std::size_t k = 0; k < s4.size(); ++k) EXPECT_NEAR(s4[k].magnitude, 4.0 * sa[k].magnitude, 1e-12);
}

TEST(ResponseSpectrum, RejectsBadInput) {
    auto s = sample([](double t) { return t; });
    EXPECT_THROW(response_spectrum(s.t, s.y, {4.0, 15.0}, kDrive), ConfigError);  // under 8 periods
    EXPECT_THROW(response_spectrum(s.t, s.y, {4.0, 20.0}, 0.0), ConfigError);
    std::vector<double> shorter(s.y.begin(), s.y.end() - 1);
    EXPECT_THROW(response_spectrum(s.t, shorter, {4.0, 20.0}, kDrive), ConfigError);
    s.t[100] += 0.003;
    EXPECT_THROW(response_spectrum(s.t, s.y, {4.0, 20.0}, kDrive), ConfigError);
}

TEST(DominantFrequency, SkipsZeroBin) {
    std::vector<SpectrumPoint> spec{{0.0, 100.0}, {1.0, 2.0}, {2.0, 3.0}, {3.0, 1.0}};
    EXPECT_EQ(dominant_frequency(spec), 2.0);
    EXPECT_EQ(magnitude_at(spec, 0.9), 2.0);
    EXPECT_EQ(magnitude_at(spec, 2.6), 1.0);
    EXPECT_THROW(dominant_frequency({}), ConfigError);
}

} // namespace
} // namespace rotsense
