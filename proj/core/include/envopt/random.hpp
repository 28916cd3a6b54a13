#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace envopt {

// Seeded RNG with hand-rolled samplers so that sequences are identical for a
// given seed independent of the standard library's distribution internals.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1).
    double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    int uniform_int(int n) { return n > 0 ? int(gen_() % uint64_t(n)) : 0; }

    // Standard normal via Box-Muller with a cached spare.
    double normal();

    // Index sampled from (possibly unnormalized) nonnegative weights.
    int categorical(std::span<const double> weights);

    // Derive an independent stream for a sub-task (splitmix-style hash).
    static uint64_t derive(uint64_t seed, uint64_t stream);

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace envopt
