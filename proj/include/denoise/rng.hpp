#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace denoise {

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

}  // namespace detail

/// Counter-based uniform generator (splitmix64 stream). Output i depends only
/// on (seed, i), so streams are reproducible across platforms and can be
/// evaluated out of order.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(detail::mix64(seed + 0x9e3779b97f4a7c15ULL)) {}

    std::uint64_t bits_at(std::uint64_t i) const {
        return detail::mix64(seed_ + (i + 1) * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform_at(std::uint64_t i) const {
        return static_cast<double>(bits_at(i) >> 11) * 0x1.0p-53;
    }

    std::uint64_t next() { return bits_at(counter_++); }

    double next_uniform() { return uniform_at(counter_++); }

    /// Unbiased integer in [0, n) via rejection sampling.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = next();
        while (v >= limit) v = next();
        return v % n;
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

/// Deterministic Fisher-Yates shuffle driven by CounterRng.
template <typename T>
void seeded_shuffle(std::vector<T>& items, std::uint64_t seed) {
    CounterRng rng(seed);
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

/// FNV-1a over bytes, then mixed. Stable across platforms; used to derive
/// per-file noise seeds from a base seed and a file identifier.
inline std::uint64_t stable_hash(std::uint64_t seed, std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return detail::mix64(h ^ detail::mix64(seed));
}

}  // namespace denoise
