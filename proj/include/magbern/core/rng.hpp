#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace magbern {

/// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Splittable counter-based stream.
///
/// The n-th output is a pure function of (key, n), so independent streams
/// derived with split() can be consumed in any order or on any thread and
/// still produce the same numbers.
class SplitStream {
  public:
    static constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ull;

    explicit constexpr SplitStream(std::uint64_t key) noexcept : key_(mix64(key + golden)) {}

    /// Child stream keyed by (this stream's key, tag).
    [[nodiscard]] constexpr SplitStream split(std::uint64_t tag) const noexcept {
        return SplitStream(key_ ^ mix64(tag * golden + 0x632be59bd9b4e019ull), raw_tag{});
    }

    constexpr std::uint64_t next_u64() noexcept { return mix64(key_ + golden * ++counter_); }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; one value per call keeps the stream stateless.
    double normal() noexcept {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    [[nodiscard]] constexpr std::uint64_t key() const noexcept { return key_; }
    [[nodiscard]] constexpr std::uint64_t counter() const noexcept { return counter_; }

  private:
    struct raw_tag {};
    constexpr SplitStream(std::uint64_t key, raw_tag) noexcept : key_(key) {}

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace magbern

