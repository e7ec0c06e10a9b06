#pragma once

// Seeded randomness with named sub-streams. One master seed drives a run;
// every consumer (polynomial sampling, measurement sampling, trial fan-out)
// derives its own stream from (master, purpose tag, index), so streams never
// interleave and results stay reproducible under concurrency.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>

namespace qtss {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a over the tag, mixed with the master seed and index.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t index = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return splitmix64(master ^ splitmix64(h) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

// mt19937_64 core. The raw 64-bit output sequence is pinned by the standard,
// and the bounded/unit draws below avoid the implementation-defined
// std::uniform_*_distribution, so seeded results are portable.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Unbiased draw from [0, bound) by rejection.
    std::uint32_t uniform_below(std::uint32_t bound) {
        if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
        const std::uint64_t b = bound;
        const std::uint64_t reject_below = (0 - b) % b;  // 2^64 mod b
        std::uint64_t r = next_u64();
        while (r < reject_below) r = next_u64();
        return static_cast<std::uint32_t>(r % b);
    }

    // 53-bit uniform in [0, 1).
    double uniform_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 gen_;
};

inline SeededRng substream(std::uint64_t master, std::string_view tag, std::uint64_t index = 0) {
    return SeededRng(derive_seed(master, tag, index));
}

}  // namespace qtss
