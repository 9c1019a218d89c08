#pragma once

#include <cstdint>
#include <random>

namespace rotsense {

/// SplitMix64 finaliser; used to derive independent seeds from counters.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Random streams consumed by a trajectory.
enum class StreamPurpose : std::uint64_t { InitialState = 0, CavityNoise = 1, AtomNumber = 2 };

/// Identifies the noise of one trajectory. The same (seed, trajectory_index) always
/// yields the same numbers, whichever thread consumes them.
struct NoiseStream {
    std::uint64_t seed = 0;
    std::uint64_t trajectory_index = 0;

    std::mt19937_64 engine(StreamPurpose purpose) const {
        const std::uint64_t key = mix_seed(mix_seed(seed, trajectory_index), static_cast<std::uint64_t>(purpose));
        std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                          static_cast<std::uint32_t>(trajectory_index), static_cast<std::uint32_t>(purpose)};
        return std::mt19937_64(seq);
    }
};

} // namespace rotsense
