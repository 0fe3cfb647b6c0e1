// Transform throughput on the 16x16 working size plus the fixed-point path.
#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "pufkey/hwmodel.hpp"
#include "pufkey/rng.hpp"
#include "pufkey/source.hpp"
#include "pufkey/transforms.hpp"

namespace {

using namespace pufkey;

Eigen::MatrixXd random_array(int rows, int cols, std::uint64_t seed) {
  CounterRng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = 30000.0 + 430.0 * rng.next_gaussian();
  return m;
}

void BM_Forward(benchmark::State& state, const Transform& tr) {
  const Eigen::MatrixXd x = random_array(16, 16, 1);
  for (auto _ : state) benchmark::DoNotOptimize(tr.forward(x));
}

void BM_RoundTrip(benchmark::State& state, const Transform& tr) {
  const Eigen::MatrixXd x = random_array(16, 16, 2);
  for (auto _ : state) benchmark::DoNotOptimize(tr.inverse(tr.forward(x)));
}

void BM_Dwht2dFixed(benchmark::State& state) {
  CounterRng rng(3);
  Grid16 g;
  for (auto& v : g) v = std::int32_t(rng.next_u64() & 0xFFFF) - 32768;
  for (auto _ : state) benchmark::DoNotOptimize(dwht2d_fixed(g));
}

// Eigendecomposition of the default 256x256 model covariance.
void BM_KltFit(benchmark::State& state) {
  const Eigen::MatrixXd cov =
      SourceModel::exponential(16, 16, 0.0, 430.0 * 430.0, 0.97, 0.0).cov;
  for (auto _ : state) benchmark::DoNotOptimize(klt_fit(cov));
}

BENCHMARK_CAPTURE(BM_Forward, dct, Transform::dct());
BENCHMARK_CAPTURE(BM_Forward, dwht, Transform::dwht());
BENCHMARK_CAPTURE(BM_Forward, dht, Transform::dht());
BENCHMARK_CAPTURE(BM_RoundTrip, dwht, Transform::dwht());
BENCHMARK(BM_Dwht2dFixed);
BENCHMARK(BM_KltFit);

}  // namespace
