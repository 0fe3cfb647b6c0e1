#include "pufkey/rng.hpp"

#include "pufkey/numeric.hpp"

namespace pufkey {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;  // golden ratio
constexpr std::uint64_t kForkGamma = 0xBF58476D1CE4E5B9ull;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::next_u64() { return mix(seed_ + (++counter_) * kGamma); }

double CounterRng::next_double() {
  // 53 random bits; [0,1).
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::next_gaussian() {
  // (u + 0.5) * 2^-64 never hits 0 or 1, so the quantile is always finite.
  const std::uint64_t u = next_u64();
  const double p = (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53;
  return norm_quantile(p);
}

CounterRng CounterRng::fork(std::uint64_t stream) const {
  return CounterRng(mix(seed_ ^ ((stream + 1) * kForkGamma)));
}

}  // namespace pufkey
