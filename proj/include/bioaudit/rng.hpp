#pragma once

// Deterministic randomness. Every stochastic routine takes an explicit
// 64-bit seed; substreams are derived by name or index so adding one
// consumer never perturbs another. std::mt19937_64 is the engine (its
// raw output sequence is pinned by the standard); the range and
// unit-interval mappings live here because std::*_distribution adapters
// are implementation-defined and would break byte-identical reruns.

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

namespace bioaudit {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Named substream, e.g. derive_seed(root, "notability").
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view name) {
    std::uint64_t h = splitmix64(root);
    for (unsigned char c : name) h = splitmix64(h ^ c);
    return h;
}

// Indexed substream, e.g. one per reshuffle iteration.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
    return splitmix64(splitmix64(root) ^ (index + 1));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, n), unbiased via rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        std::uint64_t r = engine_();
        while (r < threshold) r = engine_();
        return r % n;
    }

    // Uniform double in [0, 1), 53 bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// FNV-1a 64-bit; used for content hashes recorded in run manifests.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace bioaudit
