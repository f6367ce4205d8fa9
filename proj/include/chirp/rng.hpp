#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace chirp {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Mixes an arbitrary list of values into a single sub-seed. Used everywhere a
/// derived stream is needed (per-pair, per-repeat, per-candidate) so results do
/// not depend on evaluation order or thread scheduling.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t state = 0x8BADF00DDEADBEEFULL;
    std::uint64_t h = splitmix64(state);
    for (std::uint64_t p : parts) {
        state ^= p;
        h ^= splitmix64(state) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

/// Deterministic random source. Wraps std::mt19937_64 but supplies its own
/// integer/real draws: the standard distributions are not bit-stable across
/// library implementations, and runs must be byte-reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        engine_.seed(splitmix64(s));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Unbiased draw in [0, n).
    std::uint64_t bounded(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Inclusive integer range.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(bounded(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    /// [0, 1) with 53 bits of precision.
    double uniform_real() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform_real(); }

    /// Index draw from unnormalized non-negative weights.
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform_real() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace chirp
