#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace bulkq {

// Deterministic random source. mt19937_64 has a fully specified sequence and
// all derived values (doubles, gaussians, bounded ints) are produced by our
// own arithmetic, so identical seeds give identical results on every
// platform. Substreams are derived from (seed, stream) with splitmix64 so
// consumers can draw independently of evaluation order.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static Rng derived(std::uint64_t seed, std::uint64_t stream) {
        return Rng(mix(seed, stream));
    }

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; two uniforms per draw, no cached spare.
    double next_gaussian() {
        double u1 = 0.0;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Unbiased integer in [0, bound) by rejection.
    std::uint64_t next_index(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v = eng_();
        while (v >= limit) v = eng_();
        return v % bound;
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_index(i));
            std::swap(items[i - 1], items[j]);
        }
    }

  private:
    std::mt19937_64 eng_;
};

} // namespace bulkq
