#pragma once
/**
 * @file rng.hpp
 * @brief Seeded per-entity random streams.
 *
 * A stream is identified by (seed, stream_id); the same pair always yields the
 * same sequence. Streams with different ids are decorrelated by hashing the
 * pair through splitmix64 before seeding a 64-bit Mersenne twister.
 */

#include <cmath>
#include <cstdint>
#include <random>

namespace momo {

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Well-known stream id offsets so node, group and engine streams never collide.
namespace stream {
inline constexpr std::uint64_t node = 0;
inline constexpr std::uint64_t group = 1ULL << 32;
inline constexpr std::uint64_t placement = 2ULL << 32;
inline constexpr std::uint64_t schedule = 3ULL << 32;
inline constexpr std::uint64_t channel = 4ULL << 32;
inline constexpr std::uint64_t layout = 5ULL << 32;
}  // namespace stream

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id), engine_(splitmix64(seed ^ splitmix64(stream_id)))
    {
    }

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

    /// Uniform on [lo, hi); returns lo when the interval is degenerate.
    double uniform(double lo, double hi)
    {
        if (!(hi > lo))
            return lo;
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }

    double exponential(double mean) { return std::exponential_distribution<double>(1.0 / mean)(engine_); }

    double normal(double mean, double sd)
    {
        if (!(sd > 0.0))
            return mean;
        return std::normal_distribution<double>(mean, sd)(engine_);
    }

    /// Normal(mean, sd) conditioned on [lo, hi], by rejection.
    double truncated_normal(double mean, double sd, double lo, double hi)
    {
        if (!(sd > 0.0))
            return std::fmin(std::fmax(mean, lo), hi);
        for (int i = 0; i < 100000; ++i) {
            double x = normal(mean, sd);
            if (x >= lo && x <= hi)
                return x;
        }
        // Acceptance region carries negligible mass; fall back to the nearest bound.
        return std::fmin(std::fmax(mean, lo), hi);
    }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

}  // namespace momo
