#pragma once
// Seeded randomness with one named substream per stochastic source.
//
// Draws are produced from raw mt19937_64 words instead of the standard
// distribution adaptors, so a given (seed, substream name, draw index)
// yields the same value on every platform and compiler.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>

#include "fogstream/types.hpp"

namespace fogstream {

namespace detail {

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace detail

// A single deterministic stream of draws.
class Substream {
public:
    explicit Substream(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

// Named substreams derived from one master seed. Substream identity depends
// only on (seed, name), never on creation order, so adding a stochastic
// source does not perturb the draws of existing ones.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    Substream& substream(const std::string& name) {
        auto it = streams_.find(name);
        if (it == streams_.end()) {
            std::uint64_t sub_seed = detail::splitmix64(seed_ ^ detail::fnv1a64(name));
            it = streams_.emplace(name, Substream(sub_seed)).first;
        }
        return it->second;
    }

private:
    std::uint64_t seed_;
    std::map<std::string, Substream> streams_;
};

}  // namespace fogstream
