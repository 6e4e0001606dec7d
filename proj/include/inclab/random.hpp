#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace inclab {

/// Explicitly seeded random stream. Every sampler takes one by reference;
/// there is no global generator anywhere in the library.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based split: the stream for `index` depends only on (master, index),
/// so replica streams do not depend on how work is scheduled.
inline Rng derive_stream(std::uint64_t master, std::uint64_t index) {
    return Rng(splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL)));
}

// (0,1], never returns 0 so logs are finite.
inline double uniform_open(Rng& rng) {
    return 1.0 - std::generate_canonical<double, 64>(rng);
}

inline double uniform01(Rng& rng) { return std::generate_canonical<double, 64>(rng); }

inline double exponential(Rng& rng, double rate) { return -std::log(uniform_open(rng)) / rate; }

inline double standard_normal(Rng& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    return n01(rng);
}

inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> u(0, n - 1);
    return u(rng);
}

}  // namespace inclab
