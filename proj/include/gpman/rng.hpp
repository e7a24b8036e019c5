#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace gpman {

// xoshiro256** with splitmix64 seeding. Hand-rolled so that streams are
// reproducible across compilers and platforms (std::normal_distribution is
// not specified bit-for-bit by the standard).
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    // Uniform in [0,1) with 53 random bits.
    double uniform01();
    // Uniform integer in [0, bound), unbiased by rejection.
    std::uint64_t uniform_below(std::uint64_t bound);
    // Standard normal via Box-Muller (one value per two uniforms).
    double normal();

private:
    std::uint64_t s_[4];
};

// Derive an independent substream seed from a master seed and a fixed label.
// Used to keep node sampling, prior sampling, and observation noise decoupled.
std::uint64_t substream_seed(std::uint64_t master, std::string_view label);

// n distinct indices uniform without replacement from {0,...,population-1},
// in draw order (partial Fisher-Yates).
std::vector<int> sample_without_replacement(int n, int population, Rng& rng);

} // namespace gpman
