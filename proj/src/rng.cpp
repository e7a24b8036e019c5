#include "gpman/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "gpman/types.hpp"

namespace gpman {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& s : s_) s = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
    if (bound == 0) throw numerical_error("uniform_below: zero bound");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold) return r % bound;
    }
}

double Rng::normal() {
    // Box-Muller, cosine branch only; u1 > 0 guaranteed by the +2^-54 offset.
    const double u1 = uniform01() + 0x1.0p-54;
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t substream_seed(std::uint64_t master, std::string_view label) {
    std::uint64_t s = master ^ rotl(fnv1a64(label), 17);
    return splitmix64(s);
}

std::vector<int> sample_without_replacement(int n, int population, Rng& rng) {
    if (n < 0 || n > population)
        throw numerical_error("sample_without_replacement: n out of range");
    std::vector<int> pool(population);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < n; ++i) {
        const int j = i + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(population - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(n);
    return pool;
}

} // namespace gpman
