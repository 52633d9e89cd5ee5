#pragma once

#include <array>
#include <cstdint>

namespace cvqe {

/**
 * Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
 * numbers: as easy as 1, 2, 3", SC'11).
 *
 * Every random number in the library is a pure function of
 * (seed, stream, index): the 64-bit seed is the key, and the 128-bit counter
 * holds the stream id in its low half and the draw index in its high half.
 * Results are bit-identical on every platform and independent of how draws are
 * distributed across threads.
 *
 * Stream assignments:
 *   - coupling of edge e           : stream = e
 *   - shot number i during sampling: stream = kSampleStream, index = i
 *   - ensemble realization seeds   : stream = kEnsembleStream, index = r
 */
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Block generate(Block counter, Key key) noexcept;
};

inline constexpr std::uint64_t kSampleStream = 0x5348'4f54'0000'0000ULL;    // "SHOT"
inline constexpr std::uint64_t kEnsembleStream = 0x454e'5342'0000'0000ULL;  // "ENSB"
inline constexpr std::uint64_t kStartVectorStream = 0x5354'5254'0000'0000ULL;

/// 64 random bits for (seed, stream, index).
std::uint64_t random_bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept;

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept;

}  // namespace cvqe
