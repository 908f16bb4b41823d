#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace lsm {

/// Seeded random source with portable sampling on top of std::mt19937_64.
/// The engine sequence is fixed by the standard; the samplers below avoid
/// std::uniform_*_distribution, whose output is implementation-defined, so
/// the same seed yields the same draws on every platform.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Unbiased integer in [0, n), n >= 1. Rejection sampling.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        std::uint64_t x;
        do {
            x = eng_();
        } while (x < threshold);
        return x % n;
    }

    /// Uniform double in [lo, hi) with 53-bit resolution.
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    /// k distinct indices from [0, n), optionally excluding one value,
    /// returned in ascending order. Partial Fisher-Yates over `scratch`.
    std::vector<std::uint32_t> sample_distinct(std::uint32_t n, std::uint32_t k,
                                               std::int64_t exclude = -1);

private:
    std::mt19937_64 eng_;
};

/// Derives an independent stream seed from a base seed (splitmix64 step).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace lsm
