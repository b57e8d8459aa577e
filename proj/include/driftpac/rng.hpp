#pragma once

#include <cstdint>
#include <random>

namespace driftpac {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for substream (stream, index) of a master seed. Substreams are
/// independent of evaluation order, so per-run or per-step work can be
/// reordered without changing results.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0) {
    return splitmix64(splitmix64(splitmix64(master) ^ stream) + index);
}

}  // namespace driftpac
