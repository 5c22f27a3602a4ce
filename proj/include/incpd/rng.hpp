#pragma once

// Random number plumbing shared by every sampler.
//
// The repository uses a single generator, std::mt19937_64. Independent
// streams are derived from a master seed with the SplitMix64 finalizer, so
// replica r of an experiment always sees the same stream regardless of
// scheduling.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace incpd {

using Rng = std::mt19937_64;

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Seed of stream `index` under `master`.
constexpr std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master) ^ (index * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t index) {
    return Rng{mix_seed(master, index)};
}

// Uniform on the open interval (0, 1).
inline double uniform_open(Rng& rng) {
    for (;;) {
        const double u = std::generate_canonical<double, 53>(rng);
        if (u > 0.0 && u < 1.0) return u;
    }
}

// Uniform integer in [0, bound).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>{0, bound - 1}(rng);
}

inline double exponential(Rng& rng, double rate) {
    return -std::log(uniform_open(rng)) / rate;
}

}  // namespace incpd
