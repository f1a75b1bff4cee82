#pragma once

#include <cstdint>
#include <limits>

namespace cogarq {

/// Counter-based generator: the i-th output is a bijective mix of (key + i * golden gamma),
/// so a stream is fully determined by its key. Streams for parallel work are derived from
/// (master seed, index) and never shared.
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t key) noexcept : counter_(key) {}

    static RandomStream derive(std::uint64_t master_seed, std::uint64_t index) noexcept
    {
        return RandomStream(mix(master_seed ^ mix(index + 0x632be59bd9b4e019ULL)));
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        counter_ += kGamma;
        return mix(counter_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
    std::uint64_t counter_;
};

} // namespace cogarq
