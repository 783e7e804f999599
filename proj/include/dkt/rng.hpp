#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace dkt {

// Deterministic seeded random stream. The generator is SplitMix64: the
// state advances by a fixed odd constant and each output is a bijective
// mix of the state, i.e. output i is a pure function of (seed, i). The
// same seed therefore yields the same stream on every platform, which the
// whole experiment pipeline relies on.
//
// Normal variates use Box-Muller on consecutive uniforms (cosine branch
// only, no cached spare) so the call sequence maps 1:1 onto the uniform
// stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe as a log argument.
    double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Standard normal via Box-Muller.
    double normal() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n ? next_u64() % n : 0; }

    // Fisher-Yates shuffle, fixed algorithm for cross-platform stability.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Independent child stream; used for per-student / per-particle /
    // per-epoch substreams so parallel order never affects results.
    Rng derive(std::uint64_t stream) const {
        return Rng(mix(state_ ^ 0xA5A5A5A5DEADBEEFull, stream));
    }

    Rng derive2(std::uint64_t a, std::uint64_t b) const {
        return Rng(mix(mix(state_ ^ 0xA5A5A5A5DEADBEEFull, a), b));
    }

private:
    static std::uint64_t mix(std::uint64_t h, std::uint64_t k) {
        h ^= k + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        h *= 0xFF51AFD7ED558CCDull;
        h ^= h >> 33;
        return h;
    }

    std::uint64_t state_;
};

}  // namespace dkt
