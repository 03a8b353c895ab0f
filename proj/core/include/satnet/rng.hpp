#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace satnet {

// Seed derivation and sampling helpers. Every subsystem draws from its own
// stream derived from the master seed via a stable label, so e.g. exploration
// noise can never perturb the topology trajectory. std::mt19937_64 output is
// fully specified by the standard; the distributions below avoid
// std::uniform_*_distribution, whose algorithms are implementation-defined.

uint64_t splitmix64(uint64_t x);

// Stable 64-bit seed for (master, label) and an optional index, e.g.
// derive_seed(seed, "topology", epoch).
uint64_t derive_seed(uint64_t master, std::string_view label, uint64_t index = 0);

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [lo, hi], inclusive. Rejection sampling, unbiased.
  int64_t uniform_int(int64_t lo, int64_t hi);

  bool bernoulli(double p) { return uniform01() < p; }

  // Standard normal via Box-Muller (deterministic draw order).
  double normal();

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace satnet
