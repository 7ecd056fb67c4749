#pragma once

#include <cstdint>
#include <random>

namespace epicost {

// splitmix64 finalizer; used both as a seed scrambler and to derive
// independent child streams from one master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Counter-based child-seed derivation: child k of a master seed is
// splitmix64(master ^ golden*(k+1)). Every concurrent unit of work
// (Monte Carlo run, sweep cell, sample draw) gets its own child so that
// parallel and serial execution produce identical results.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
}

// mt19937_64 wrapper producing uniforms via explicit bit manipulation so the
// sampled values do not depend on the standard library's distribution
// implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t uniform_index(std::uint64_t n) {
        // multiply-shift; bias is negligible for n << 2^64
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 gen_;
};

}  // namespace epicost
