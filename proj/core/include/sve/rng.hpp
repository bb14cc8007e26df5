#pragma once

#include <cstdint>

namespace sve {

// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_key3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix64(mix64(mix64(a) ^ b) ^ c);
}

// Uniform double strictly inside (0,1) from 64 random bits.
inline double uniform_from_bits(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Inverse of the standard normal CDF (Wichura's PPND16); relative accuracy
// ~1e-15 over (0,1).
double inverse_normal_cdf(double p);

// Counter-based standard normal draw: a pure function of the key, so any
// increment can be generated independently and in any order.
inline double gaussian_at(std::uint64_t seed, std::uint64_t index, std::uint64_t coordinate) {
    return inverse_normal_cdf(uniform_from_bits(mix_key3(seed, index, coordinate)));
}

// Per-path seed derivation for embarrassingly parallel Monte Carlo.
inline std::uint64_t derive_path_seed(std::uint64_t master_seed, std::uint64_t path_index) {
    return mix_key3(master_seed, 0x70617468ULL, path_index);
}

} // namespace sve
