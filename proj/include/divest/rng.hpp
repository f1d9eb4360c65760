#pragma once

#include <array>
#include <cstdint>

namespace divest {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// Every random quantity in the library is addressed by (seed, stream, index):
// the seed is the 64-bit key, the stream selects an independent substream
// and the index walks through it. Nothing depends on call order or thread
// partitioning, so results are reproducible across platforms and thread counts.

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32-10 block: ten rounds applied to `counter` under `key`.
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

/// Mixes several 64-bit words into one seed (SplitMix64 finalizer chain).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Sequential view over a single Philox substream.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream);

    std::uint32_t next_u32();
    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform();
    /// Standard normal via Box-Muller; caches the second variate.
    double normal();

private:
    PhiloxKey key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    PhiloxCounter buffer_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace divest
