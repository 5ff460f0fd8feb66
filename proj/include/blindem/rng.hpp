#pragma once

#include <cstdint>
#include <random>

namespace blindem {

/// Independent random streams per Monte Carlo trial.
///
/// Each (base seed, trial, role) triple is hashed through SplitMix64 into the
/// seed of its own mt19937_64, so trials and roles never share state and any
/// trial can be regenerated on its own.
enum class StreamRole : std::uint64_t {
    data = 1,
    interleaver = 2,
    channel = 3,
    preamble = 4,
    noise = 5,
    init = 6,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t trial, StreamRole role) {
    std::uint64_t s = splitmix64(base);
    s = splitmix64(s ^ trial);
    return splitmix64(s ^ static_cast<std::uint64_t>(role));
}

using Rng = std::mt19937_64;

}  // namespace blindem
