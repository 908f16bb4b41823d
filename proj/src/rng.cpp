#include "lsm/rng.hpp"

#include <algorithm>
#include <numeric>

namespace lsm {

std::vector<std::uint32_t> SeededRng::sample_distinct(std::uint32_t n, std::uint32_t k,
                                                      std::int64_t exclude) {
    std::vector<std::uint32_t> pool;
    pool.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        if (static_cast<std::int64_t>(i) != exclude) pool.push_back(i);
    }
    std::vector<std::uint32_t> picked(k);
    for (std::uint32_t j = 0; j < k; ++j) {
        const std::uint64_t r = j + below(pool.size() - j);
        std::swap(pool[j], pool[r]);
        picked[j] = pool[j];
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + stream * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace lsm
