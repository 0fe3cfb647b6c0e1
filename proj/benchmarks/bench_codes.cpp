// Codec hot paths: the decoders dominate reconstruction latency.
#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "pufkey/codes.hpp"
#include "pufkey/rng.hpp"

namespace {

using namespace pufkey;

Bits random_bits(CounterRng& rng, int n) {
  Bits b(n);
  for (int i = 0; i < n; ++i) b[i] = std::uint8_t(rng.next_u64() & 1);
  return b;
}

// Codeword with `weight` random flips on top.
Bits noisy_codeword(const Code& code, int weight, std::uint64_t seed) {
  CounterRng rng(seed);
  Bits cw = code.encode(random_bits(rng, code.k()));
  std::vector<int> idx(cw.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (int j = 0; j < weight; ++j) {
    std::swap(idx[j], idx[j + int(rng.next_u64() % (idx.size() - j))]);
    cw[idx[j]] ^= 1;
  }
  return cw;
}

void BM_Encode(benchmark::State& state, const char* name) {
  const Code code = Code::from_name(name);
  CounterRng rng(11);
  const Bits msg = random_bits(rng, code.k());
  for (auto _ : state) benchmark::DoNotOptimize(code.encode(msg));
}

void BM_Decode(benchmark::State& state, const char* name, int weight) {
  const Code code = Code::from_name(name);
  const Bits received = noisy_codeword(code, weight, 12);
  for (auto _ : state) benchmark::DoNotOptimize(code.decode(received));
}

BENCHMARK_CAPTURE(BM_Encode, bch255_131, "bch255_131");
BENCHMARK_CAPTURE(BM_Encode, rm32_6_rs28_22, "rm32_6+rs28_22");
BENCHMARK_CAPTURE(BM_Decode, bch_clean, "bch255_131", 0);
BENCHMARK_CAPTURE(BM_Decode, bch_18err, "bch255_131", 18);
BENCHMARK_CAPTURE(BM_Decode, rm32_6_4err, "rm32_6", 4);
BENCHMARK_CAPTURE(BM_Decode, concat_7err, "rm32_6+rs28_22", 7);
BENCHMARK_CAPTURE(BM_Decode, rep3, "rep3", 1);

}  // namespace
