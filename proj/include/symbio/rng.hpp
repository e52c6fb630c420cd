#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace symbio {

// Seedable 64-bit Mersenne Twister with platform-independent draws.
//
// The standard distributions are implementation-defined, so all draws are
// derived here from raw engine output. Sub-streams are obtained with
// derive_seed(seed, stream) and never by sharing one engine across owners.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    auto next() -> std::uint64_t { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    auto uniform01() -> double { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    auto uniform(double lo, double hi) -> double { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n). n must be > 0. Rejection sampling, no modulo bias.
    auto index(std::uint64_t n) -> std::uint64_t
    {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = next();
        while (x >= limit) {
            x = next();
        }
        return x % n;
    }

    auto bernoulli(double p) -> bool { return uniform01() < p; }

    // k distinct indices from [0, n), ascending.
    auto sample_without_replacement(std::size_t n, std::size_t k) -> std::vector<std::size_t>;

    template <typename T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// SplitMix64 finalizer.
constexpr auto mix64(std::uint64_t x) -> std::uint64_t
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed of sub-stream `stream` of `seed`.
constexpr auto derive_seed(std::uint64_t seed, std::uint64_t stream) -> std::uint64_t
{
    return mix64(seed ^ mix64(stream));
}

// Named sub-streams used by the pipelines.
namespace stream {
inline constexpr std::uint64_t balance = 1;
inline constexpr std::uint64_t fit = 2;
inline constexpr std::uint64_t baselines = 3;
} // namespace stream

inline auto Rng::sample_without_replacement(std::size_t n, std::size_t k) -> std::vector<std::size_t>
{
    // Floyd's algorithm.
    std::vector<char> taken(n, 0);
    for (std::size_t j = n - k; j < n; ++j) {
        const auto t = static_cast<std::size_t>(index(j + 1));
        if (taken[t]) {
            taken[j] = 1;
        } else {
            taken[t] = 1;
        }
    }
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) {
            out.push_back(i);
        }
    }
    return out;
}

} // namespace symbio
