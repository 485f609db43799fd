#pragma once

#include <cstdint>

namespace modval {

/// Counter-based generator: the value for (key, counter) is the SplitMix64
/// output at that stream position, so any trial can be drawn independently
/// of every other trial.
class CounterRng {
  public:
    explicit constexpr CounterRng(std::uint64_t seed) noexcept : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    /// Independent stream derived from this one, e.g. one per calibration step.
    constexpr CounterRng substream(std::uint64_t index) const noexcept {
        CounterRng r(0);
        r.key_ = mix(key_ + (index + 1) * 0xbf58476d1ce4e5b9ULL);
        return r;
    }

    constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
        return mix(key_ + (counter + 1) * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform(std::uint64_t counter) const noexcept {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

  private:
    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
};

}  // namespace modval
