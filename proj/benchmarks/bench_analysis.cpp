// Tail computations and the quantizer design loop.
#include <benchmark/benchmark.h>

#include <vector>

#include "pufkey/analysis.hpp"
#include "pufkey/quantize.hpp"
#include "pufkey/rng.hpp"

namespace {

using namespace pufkey;

std::vector<double> profile255(std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> q(255);
  for (double& v : q) v = 0.02 * rng.next_double();
  return q;
}

void BM_BinomialTail(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(binomial_tail(256, 0.010368, 17));
}

void BM_PoissonBinomialDftcf(benchmark::State& state) {
  const std::vector<double> q = profile255(21);
  for (auto _ : state) benchmark::DoNotOptimize(poisson_binomial_tail_dftcf(q, 18));
}

void BM_PoissonBinomialDp(benchmark::State& state) {
  const std::vector<double> q = profile255(21);
  for (auto _ : state) benchmark::DoNotOptimize(poisson_binomial_tail_dp(q, 18));
}

void BM_EeTail(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ee_tail(28, 7, 4.54e-6, 6.57e-5));
}

void BM_CorrectnessThreshold(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(correctness_threshold(19, 256));
}

// One transition-matrix evaluation, the unit of work behind every D(K)/P_c(K)
// query during allocation.
void BM_TransitionMatrix(benchmark::State& state) {
  const int bits = int(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(transition_matrix(bits, 0.1));
}

BENCHMARK(BM_BinomialTail);
BENCHMARK(BM_PoissonBinomialDftcf);
BENCHMARK(BM_PoissonBinomialDp);
BENCHMARK(BM_EeTail);
BENCHMARK(BM_CorrectnessThreshold);
BENCHMARK(BM_TransitionMatrix)->Arg(1)->Arg(3);

}  // namespace
