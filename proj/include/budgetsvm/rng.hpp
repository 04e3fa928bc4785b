#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace budgetsvm {

/// SplitMix64 step: advances `state` and returns the next output.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Independent streams derived from one user seed.
enum class RngStream : std::uint64_t { training = 0, synthetic = 1, verification = 2 };

/**
 * std::mt19937_64 seeded through SplitMix64 from (seed, stream), so distinct
 * consumers of one seed never share a sequence. Index draws use Lemire's
 * unbiased multiply-shift method and are identical on every platform.
 */
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed, RngStream stream = RngStream::training) {
        std::uint64_t state = seed ^ (static_cast<std::uint64_t>(stream) * 0xD1B54A32D192ED03ULL);
        std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)),
                          static_cast<std::uint32_t>(splitmix64(state)),
                          static_cast<std::uint32_t>(splitmix64(state)),
                          static_cast<std::uint32_t>(splitmix64(state))};
        engine_.seed(seq);
    }

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    /// Uniform integer in [0, n), n >= 1.
    std::size_t uniform_index(std::size_t n) {
        const auto bound = static_cast<std::uint64_t>(n);
        unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = -bound % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(engine_()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::size_t>(m >> 64);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace budgetsvm
