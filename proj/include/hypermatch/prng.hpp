#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace hypermatch::prng {

// Counter-mode generator built on the splitmix64 finalizer.
//
// The draw at counter i for a given (seed, stream) is
//     mix(base(seed, stream) + (i + 1) * GAMMA)
// so every draw is a pure function of (seed, stream, i): any value can be
// recomputed independently and in any order, which is what makes generated
// instances bit-reproducible across runs and platforms. Distinct stream ids
// decorrelate subsystems that share one user-facing seed; substream() derives
// further streams from loop indices.

inline std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

inline constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t base(std::uint64_t seed, std::uint64_t stream) {
    return mix(seed + kGamma) ^ mix(stream * kGamma + 0x6a09e667f3bcc909ULL);
}

inline std::uint64_t at(std::uint64_t seed, std::uint64_t stream, std::uint64_t i) {
    return mix(base(seed, stream) + (i + 1) * kGamma);
}

// Uniform in [0, 1), 53 mantissa bits.
inline double u01(std::uint64_t seed, std::uint64_t stream, std::uint64_t i) {
    return double(at(seed, stream, i) >> 11) * 0x1.0p-53;
}

// Uniform in [0, bound). Plain modulo; the bias is irrelevant at the bounds
// used here and keeps the draw a single recomputable expression.
inline std::uint64_t bounded(std::uint64_t seed, std::uint64_t stream, std::uint64_t i,
                             std::uint64_t bound) {
    return at(seed, stream, i) % bound;
}

inline std::uint64_t substream(std::uint64_t stream, std::uint64_t a, std::uint64_t b = 0) {
    return mix(stream ^ mix(a + kGamma) ^ (mix(b + 0x243f6a8885a308d3ULL) << 1));
}

// Stream ids, one per subsystem.
inline constexpr std::uint64_t kStreamRandomEdges = 1;
inline constexpr std::uint64_t kStreamFloorRepair = 2;
inline constexpr std::uint64_t kStreamAbsorbSample = 3;
inline constexpr std::uint64_t kStreamAbsorbVerify = 4;
inline constexpr std::uint64_t kStreamTests = 100;

// In-place Fisher-Yates shuffle driven by the counter generator.
template <class T>
void shuffle(std::vector<T>& v, std::uint64_t seed, std::uint64_t stream) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = std::size_t(bounded(seed, stream, i, i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace hypermatch::prng
