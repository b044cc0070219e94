#pragma once

#include <cstdint>

namespace synthrm {

// splitmix64; fixed algorithm so streams are identical across platforms.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic child-seed derivation: child = hash(parent, index).
inline uint64_t derive_seed(uint64_t parent, uint64_t index) {
    uint64_t s = parent ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    return splitmix64(s);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {
        // Warm up so adjacent seeds decorrelate immediately.
        splitmix64(state_);
    }

    uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, 1).
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in [0, n).
    uint64_t next_below(uint64_t n) { return next_u64() % n; }

    bool bernoulli(double p) { return next_double() < p; }

private:
    uint64_t state_;
};

} // namespace synthrm
