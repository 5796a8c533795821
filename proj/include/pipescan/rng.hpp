#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

// Counter-based deterministic random helpers. Frame renders draw per-pixel
// noise from a hash of (seed, frame, pixel) so the result is byte-identical
// regardless of thread count or iteration order.

namespace pipescan {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

// Uniform in (0, 1]; never returns 0 so it is safe under log().
inline double hash_uniform(std::uint64_t key) {
    return (static_cast<double>(splitmix64(key) >> 11) + 1.0) * 0x1.0p-53;
}

// Standard normal via Box-Muller on two decorrelated uniforms.
inline double hash_normal(std::uint64_t key) {
    const double u1 = hash_uniform(key);
    const double u2 = hash_uniform(splitmix64(key ^ 0xda3e39cb94b95bdbULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

} // namespace pipescan
