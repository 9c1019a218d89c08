#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rotsense/ensemble.hpp"
#include "rotsense/error.hpp"
#include "rotsense/units.hpp"

namespace rotsense {

struct SpectrumPoint {
    double frequency;  ///< angular frequency, rad/ms
    double magnitude;  ///< amplitude-normalised
};

/// Half-open time interval [begin, end) in ms.
struct TimeWindow {
    double begin = 0.0;
    double end = 0.0;
};

/// Magnitude spectrum of `values` restricted to `window`, after mean removal and a
/// periodic Hann taper. Requires a uniform grid and at least 8 drive periods.
inline std::vector<SpectrumPoint> response_spectrum(std::span<const double> times, std::span<const double> values,
                                                    TimeWindow window, double omega_drive) {
    if (times.size() != values.size()) throw ConfigError("response_spectrum: times and values differ in length");
    if (times.size() < 2) throw ConfigError("response_spectrum: series too short");
    const double step = times[1] - times[0];
    const double eps = 1e-6 * step;

    std::vector<double> x;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0 && std::abs(times[i] - times[i - 1] - step) > eps)
            throw ConfigError("response_spectrum: sampling grid is not uniform");
        if (times[i] >= window.begin - eps && times[i] < window.end - eps) x.push_back(values[i]);
    }
    const double duration = static_cast<double>(x.size()) * step;
    const double needed = 8.0 * kTwoPi / omega_drive;
    if (!(omega_drive > 0.0) || duration < needed * (1.0 - 1e-9))
        throw ConfigError("response_spectrum: window of " + std::to_string(duration) + " ms covers fewer than 8 drive periods (" +
                          std::to_string(needed) + " ms needed)");

    const std::size_t n = x.size();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);

    double taper_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n)));
        x[i] = (x[i] - mean) * w;
        taper_sum += w;
    }

    std::vector<SpectrumPoint> out;
    out.reserve(n / 2 + 1);
    for (std::size_t k = 0; k <= n / 2; ++k) {
        std::complex<double> acc{};
        for (std::size_t i = 0; i < n; ++i) {
            const double phase = -kTwoPi * static_cast<double>((k * i) % n) / static_cast<double>(n);
            acc += x[i] * std::complex<double>(std::cos(phase), std::sin(phase));
        }
        out.push_back({kTwoPi * static_cast<double>(k) / duration, 2.0 * std::abs(acc) / taper_sum});
    }
    return out;
}

inline std::vector<SpectrumPoint> response_spectrum(const EnsembleSeries& series, TimeWindow window, double omega_drive) {
    return response_spectrum(series.times, series.mean_photon, window, omega_drive);
}

/// Frequency of the largest magnitude, excluding the zero bin.
inline double dominant_frequency(const std::vector<SpectrumPoint>& spectrum) {
    if (spectrum.size() < 2) throw ConfigError("dominant_frequency: empty spectrum");
    std::size_t best = 1;
    for (std::size_t k = 2; k < spectrum.size(); ++k)
        if (spectrum[k].magnitude > spectrum[best].magnitude) best = k;
    return spectrum[best].frequency;
}

/// Magnitude of the bin closest to `frequency`.
inline double magnitude_at(const std::vector<SpectrumPoint>& spectrum, double frequency) {
    if (spectrum.empty()) throw ConfigError("magnitude_at: empty spectrum");
    std::size_t best = 0;
    for (std::size_t k = 1; k < spectrum.size(); ++k)
        if (std::abs(spectrum[k].frequency - frequency) < std::abs(spectrum[best].frequency - frequency)) best = k;
    return spectrum[best].magnitude;
}

} // namespace rotsense
