#pragma once

#include <cstdint>

namespace cma {

// Counter-based generator: the value for (seed, counter) depends on nothing
// else, so any partition of the counter range across workers reproduces the
// serial stream exactly.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t counter)
{
    return mix64(mix64(seed + 0x9e3779b97f4a7c15ULL) ^ (counter * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
}

/// Uniform integer in [0, bound) for bound > 0 (multiply-shift reduction).
constexpr std::uint64_t counter_uniform(std::uint64_t seed, std::uint64_t counter, std::uint64_t bound)
{
    const unsigned __int128 wide = static_cast<unsigned __int128>(counter_hash(seed, counter)) * bound;
    return static_cast<std::uint64_t>(wide >> 64);
}

/// Sequential view over the counter stream, for single-threaded consumers.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t start = 0) : seed_(seed), counter_(start) {}

    std::uint64_t next() { return counter_hash(seed_, counter_++); }
    std::uint64_t below(std::uint64_t bound) { return counter_uniform(seed_, counter_++, bound); }
    [[nodiscard]] std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

}  // namespace cma
