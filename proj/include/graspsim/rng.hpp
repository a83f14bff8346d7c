#pragma once

#include <cstdint>
#include <random>

namespace graspsim {

// Seeded stream used by every stochastic part of the simulator.
//
// Engine: std::mt19937_64 (MT19937-64, Matsumoto & Nishimura), seeded with
// the raw 64-bit seed. The standard fixes its output sequence bit-for-bit.
// Doubles are taken from the top 53 bits of one engine draw, so the mapping
// does not depend on a standard-library distribution implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace graspsim
