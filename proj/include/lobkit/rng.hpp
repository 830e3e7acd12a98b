#pragma once

#include <cmath>
#include <cstdint>

namespace lobkit {

/// SplitMix64 output function (Steele, Lea & Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

__extension__ using Uint128 = unsigned __int128;

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// Derives an independent stream key from a parent key and an index.
/// key' = mix64(mix64(key) + (index + 1) * golden).
constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t index) {
    return mix64(mix64(key) + (index + 1) * kGolden);
}

/// Counter-based 64-bit generator: the i-th output of a stream with key k is
/// mix64(k + (i + 1) * golden). Any output can be computed without the ones
/// before it, which makes per-resample and per-lag streams reproducible
/// regardless of scheduling.
class CounterRng {
public:
    constexpr explicit CounterRng(std::uint64_t key) : key_(key) {}

    constexpr std::uint64_t next() {
        ++counter_;
        return mix64(key_ + counter_ * kGolden);
    }

    constexpr std::uint64_t at(std::uint64_t i) const { return mix64(key_ + (i + 1) * kGolden); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [0, n), unbiased (Lemire's multiply-and-reject).
    std::uint64_t below(std::uint64_t n) {
        Uint128 m = static_cast<Uint128>(next()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<Uint128>(next()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Exponential with the given rate (> 0).
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_{0};
};

}  // namespace lobkit
