#pragma once

// Counter-based random streams. A stream is identified by (seed, stream id);
// draws within a stream are addressed by an index. Nothing depends on the
// order in which streams are consumed, so serial and parallel runs agree bit
// for bit.

#include <cstdint>

#include "rpvtest/distributions.hpp"

namespace rpvtest::rng {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derive a child seed; distinct (seed, id) pairs give unrelated keys.
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t id) noexcept {
    return mix64(mix64(seed) ^ mix64(id ^ 0x6a09e667f3bcc909ULL));
}

/// Uniform in the open interval (0, 1) built from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

class Stream {
public:
    constexpr Stream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : key_(derive(seed, stream_id)) {}

    /// The i-th raw 64-bit value of the stream.
    constexpr std::uint64_t bits(std::uint64_t i) const noexcept {
        return mix64(key_ + (i + 1) * 0x9e3779b97f4a7c15ULL);
    }

    constexpr double uniform(std::uint64_t i) const noexcept { return to_unit(bits(i)); }

    /// Standard normal by inversion, so one normal costs one uniform.
    double normal(std::uint64_t i) const { return dist::normal_quantile(uniform(i)); }

    /// Uniform integer in [0, n) via multiply-shift on the high bits.
    std::uint64_t below(std::uint64_t i, std::uint64_t n) const noexcept {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits(i)) * n) >> 64);
    }

    std::uint64_t key() const noexcept { return key_; }

private:
    std::uint64_t key_;
};

/// Sequential cursor over a Stream, for code that just wants "the next draw".
class Cursor {
public:
    Cursor(std::uint64_t seed, std::uint64_t stream_id) noexcept : stream_(seed, stream_id) {}

    double uniform() noexcept { return stream_.uniform(pos_++); }
    double normal() { return stream_.normal(pos_++); }
    std::uint64_t below(std::uint64_t n) noexcept { return stream_.below(pos_++, n); }

private:
    Stream stream_;
    std::uint64_t pos_ = 0;
};

}  // namespace rpvtest::rng
