#pragma once

#include <cstdint>

namespace gridsynth {

/// SplitMix64 output finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based generator: the n-th output is mix64(key + n * golden-gamma),
/// which is exactly SplitMix64 started at `key`. Only integer arithmetic is
/// involved, so a given (seed, sample, substream) yields the same words on
/// every platform. Streams are cheap to construct; one per load per sample.
class RngStream {
public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    RngStream(std::uint64_t seed, std::uint64_t sample, std::uint64_t substream) noexcept
        : key_(derive_key(seed, sample, substream)) {}

    static constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t sample,
                                              std::uint64_t substream) noexcept {
        std::uint64_t h = mix64(seed + kGamma);
        h = mix64(h ^ mix64(sample + 0x632BE59BD9B4E019ULL));
        h = mix64(h ^ mix64(substream + 0x8CB92BA72F3D8DD7ULL));
        return h;
    }

    std::uint64_t next_u64() noexcept { return mix64(key_ + (++counter_) * kGamma); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1): midpoints of a 2^-52 grid, so the
    /// extremes are 2^-53 and 1 - 2^-53, both exactly representable.
    double uniform_open() noexcept { return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52; }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t draws() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace gridsynth
