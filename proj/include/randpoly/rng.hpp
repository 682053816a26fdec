#pragma once

// Reproducible random streams. Every stochastic operation draws from a
// RandomStream derived from (master_seed, stream_index); the derivation is a
// pure function, so replicated work can be farmed out to any number of
// workers and still reproduce bit-identical results when folded in stream
// order.

#include <cmath>
#include <cstdint>
#include <random>

namespace randpoly {

struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace detail

class RandomStream {
public:
    explicit RandomStream(std::uint64_t s0, std::uint64_t s1, std::uint64_t s2, std::uint64_t s3) {
        std::seed_seq seq{static_cast<std::uint32_t>(s0), static_cast<std::uint32_t>(s0 >> 32),
                          static_cast<std::uint32_t>(s1), static_cast<std::uint32_t>(s1 >> 32),
                          static_cast<std::uint32_t>(s2), static_cast<std::uint32_t>(s2 >> 32),
                          static_cast<std::uint32_t>(s3), static_cast<std::uint32_t>(s3 >> 32)};
        engine_.seed(seq);
    }

    std::uint64_t raw() { return engine_(); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // index uniform in {0, ..., n-1}
    std::uint64_t below(std::uint64_t n) {
        // multiply-shift; bias is negligible for the n used here (< 2^32)
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

    // standard normal via the polar method; one value cached
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        cached_ = v * m;
        have_cached_ = true;
        return u * m;
    }

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// Stream k under a seed spec. Identical (master_seed, stream_index + k)
// always yields the identical draw sequence.
inline RandomStream derive_stream(const SeedSpec& seed, std::uint64_t k) {
    std::uint64_t state = seed.master_seed ^ 0xA3EC647659359ACDULL;
    const std::uint64_t s0 = detail::splitmix64(state);
    state ^= (seed.stream_index + k) * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL;
    const std::uint64_t s1 = detail::splitmix64(state);
    const std::uint64_t s2 = detail::splitmix64(state);
    const std::uint64_t s3 = detail::splitmix64(state);
    return RandomStream(s0, s1, s2, s3);
}

inline SeedSpec with_stream_base(const SeedSpec& seed, std::uint64_t base) {
    return SeedSpec{seed.master_seed, seed.stream_index + base};
}

}  // namespace randpoly
