#pragma once

#include <cstdint>
#include <random>

namespace ftrend {

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent generator for (seed, stream); the stream index is typically a replicate number.
[[nodiscard]] inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream = 0) {
    const std::uint64_t a = splitmix64(seed), b = splitmix64(a ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

/// Seed for a nested stream, e.g. replicate r of cell c.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(seed) + 0x9e3779b97f4a7c15ULL * (index + 1));
}

}  // namespace ftrend
