#pragma once

#include <cmath>
#include <cstdint>

namespace roughfou {

// Counter-based splitmix64 stream.  One independent stream is derived per
// (seed, tag, index) triple, so the numbers drawn for history h or path i are
// a pure function of the seed and the index, regardless of evaluation order,
// batching, or thread scheduling.
struct Splitmix64 {
    std::uint64_t state;

    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t next() {
        state += kGamma;
        return mix(state);
    }

    // uniform in the open interval (0, 1); never 0, so log() below is safe
    double uniform() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }
};

// stream tags; arbitrary distinct constants
inline constexpr std::uint64_t kStreamHistory = 0x484953544f525921ull;
inline constexpr std::uint64_t kStreamForward = 0x464f525741524421ull;

inline Splitmix64 substream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
    std::uint64_t s = Splitmix64::mix(seed + Splitmix64::kGamma);
    s = Splitmix64::mix(s ^ tag);
    s = Splitmix64::mix(s ^ index);
    return Splitmix64{s};
}

struct NormalPair {
    double z0, z1;
};

// Box-Muller; two standard normals per two uniforms, fully deterministic
inline NormalPair normal_pair(Splitmix64& g) {
    const double u1 = g.uniform();
    const double u2 = g.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace roughfou
