#pragma once

#include <cstdint>

namespace pufkey {

// Counter-based generator: draw k is splitmix64_mix(seed + (k+1)*GAMMA), so a
// stream is fully determined by (seed, counter) and streams can be forked
// without sharing state. Reproducible across platforms by construction.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();
  double next_double();    // uniform on [0,1)
  double next_gaussian();  // standard normal via inverse CDF

  // Independent stream derived from (seed, stream index); used to hand one
  // stream per device / per worker chunk.
  CounterRng fork(std::uint64_t stream) const;

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace pufkey
