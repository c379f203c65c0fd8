#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace sveda {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives a child stream key from a parent key and a list of tags.
/// Distinct tag sequences give unrelated keys; the result is the same on every platform.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::initializer_list<std::uint64_t> tags) noexcept
{
    std::uint64_t key = mix64(parent + 0x9E3779B97F4A7C15ULL);
    for (std::uint64_t tag : tags)
        key = mix64(key ^ mix64(tag + 0xD1B54A32D192ED03ULL));
    return key;
}

/// Counter-based generator: output i is mix64(key + (i + 1) * golden).
///
/// This is SplitMix64 with the state split into an immutable key and a counter,
/// so every draw is a pure function of (key, position). All derived quantities
/// (uniform reals, bounded integers) are defined here rather than through
/// <random> distributions, whose algorithms differ between standard libraries.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key = 0) noexcept : key_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        ++counter_;
        return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, bound), unbiased by rejection. bound must be > 0.
    std::uint64_t below(std::uint64_t bound) noexcept
    {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = (*this)();
            if (r >= threshold)
                return r % bound;
        }
    }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t position() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace sveda
