#include "pufkey/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "pufkey/codes.hpp"
#include "pufkey/numeric.hpp"
#include "pufkey/rng.hpp"

namespace pufkey {

double binomial_tail(int n, double p, int t) {
  if (n < 0 || t < 0 || t > n) throw std::invalid_argument("binomial_tail: bad n/t");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binomial_tail: p outside [0,1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return t < n ? 1.0 : 0.0;
  const double lp = std::log(p), lq = std::log1p(-p);
  long double acc = 0.0L;
  for (int j = t + 1; j <= n; ++j)
    acc += std::exp((long double)(log_choose(n, j) + j * lp + (n - j) * lq));
  return double(std::min(acc, 1.0L));
}

double ee_tail(int n, int d, double p_err, double p_era) {
  if (p_err < 0 || p_era < 0 || p_err + p_era > 1.0)
    throw std::invalid_argument("ee_tail: bad probabilities");
  const int thr = d - 2;
  const double pc = 1.0 - p_err - p_era;
  const double le = p_err > 0 ? std::log(p_err) : 0.0;
  const double lv = p_era > 0 ? std::log(p_era) : 0.0;
  const double lc = pc > 0 ? std::log(pc) : 0.0;
  long double acc = 0.0L;
  for (int e = 0; e <= n; ++e) {
    if (p_err == 0.0 && e > 0) break;
    for (int nu = 0; nu + e <= n; ++nu) {
      if (2 * e + nu < thr) continue;
      if (p_era == 0.0 && nu > 0) break;
      const int rest = n - e - nu;
      if (pc == 0.0 && rest > 0) continue;
      const double lw = log_choose(n, e) + log_choose(n - e, nu) + e * le +
                        nu * lv + rest * lc;
      acc += std::exp((long double)lw);
    }
  }
  return double(std::min(acc, 1.0L));
}

double poisson_binomial_tail_dftcf(const std::vector<double>& q, int t) {
  const int n = int(q.size());
  if (t < 0 || t > n) throw std::invalid_argument("poisson binomial: bad t");
  for (double v : q)
    if (v < 0.0 || v > 1.0) throw std::invalid_argument("poisson binomial: q outside [0,1]");
  using C = std::complex<long double>;
  const long double step = 2.0L * std::numbers::pi_v<long double> / (n + 1);
  // z_k = prod_i (1 - q_i + q_i w^k), held as log-magnitude + phase so that
  // 255-term products near the unit circle neither overflow nor lose phase.
  std::vector<C> z(n + 1);
  for (int k = 0; k <= n; ++k) {
    const C wk(std::cos(step * k), std::sin(step * k));
    long double lm = 0.0L, ph = 0.0L;
    for (double qi : q) {
      const C f = C(1.0L - (long double)qi) + (long double)qi * wk;
      lm += std::log(std::abs(f));
      ph += std::arg(f);
    }
    z[k] = std::exp(lm) * C(std::cos(ph), std::sin(ph));
  }
  long double tail = 0.0L;
  for (int j = t + 1; j <= n; ++j) {
    C mass(0.0L, 0.0L);
    for (int k = 0; k <= n; ++k) {
      const long double ang = -step * (long double)j * k;
      mass += z[k] * C(std::cos(ang), std::sin(ang));
    }
    mass /= (long double)(n + 1);
    if (std::abs(mass.imag()) > 1e-12L)
      throw std::logic_error("poisson binomial DFT-CF: imaginary residue too large");
    tail += std::max(mass.real(), 0.0L);
  }
  return double(std::min(tail, 1.0L));
}

double poisson_binomial_tail_dp(const std::vector<double>& q, int t) {
  const int n = int(q.size());
  if (t < 0 || t > n) throw std::invalid_argument("poisson binomial: bad t");
  std::vector<long double> mass(n + 1, 0.0L);
  mass[0] = 1.0L;
  int used = 0;
  for (double qi : q) {
    if (qi < 0.0 || qi > 1.0) throw std::invalid_argument("poisson binomial: q outside [0,1]");
    for (int j = used; j >= 0; --j) {
      mass[j + 1] += mass[j] * (long double)qi;
      mass[j] *= (long double)(1.0 - qi);
    }
    ++used;
  }
  long double tail = 0.0L;
  for (int j = t + 1; j <= n; ++j) tail += mass[j];
  return double(std::min(tail, 1.0L));
}

RmChannelEstimate rm_channel_mc(double p, long long trials, std::uint64_t seed,
                                int threads) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("rm_channel_mc: p outside [0,1]");
  if (trials <= 0) throw std::invalid_argument("rm_channel_mc: trials must be positive");
  constexpr long long kChunk = 65536;
  const long long n_chunks = (trials + kChunk - 1) / kChunk;
  if (threads <= 0) threads = int(std::max(1u, std::thread::hardware_concurrency()));
  threads = int(std::min<long long>(threads, n_chunks));

  const ReedMullerCode rm;
  const CounterRng master(seed);
  std::atomic<long long> next_chunk{0};
  std::vector<long long> era(threads, 0), err(threads, 0);

  auto worker = [&](int tid) {
    long long my_era = 0, my_err = 0;
    for (;;) {
      const long long c = next_chunk.fetch_add(1);
      if (c >= n_chunks) break;
      CounterRng rng = master.fork(std::uint64_t(c));
      const long long begin = c * kChunk;
      const long long end = std::min(trials, begin + kChunk);
      for (long long i = begin; i < end; ++i) {
        Bits msg(6);
        const std::uint64_t mw = rng.next_u64();
        for (int b = 0; b < 6; ++b) msg[b] = std::uint8_t((mw >> b) & 1);
        Bits cw = rm.encode(msg);
        for (int b = 0; b < 32; ++b)
          if (rng.next_double() < p) cw[b] ^= 1u;
        const DecodeOutcome out = rm.decode_mld(cw);
        if (out.status == DecodeStatus::Erasure)
          ++my_era;
        else if (out.message != msg)
          ++my_err;
      }
    }
    era[tid] = my_era;
    err[tid] = my_err;
  };

  std::vector<std::thread> pool;
  for (int tid = 1; tid < threads; ++tid) pool.emplace_back(worker, tid);
  worker(0);
  for (auto& th : pool) th.join();

  long long n_era = 0, n_err = 0;
  for (int tid = 0; tid < threads; ++tid) {
    n_era += era[tid];
    n_err += err[tid];
  }
  RmChannelEstimate est;
  est.trials = trials;
  est.p_era = double(n_era) / double(trials);
  est.p_err = double(n_err) / double(trials);
  est.se_era = std::sqrt(est.p_era * (1.0 - est.p_era) / double(trials));
  est.se_err = std::sqrt(est.p_err * (1.0 - est.p_err) / double(trials));
  return est;
}

FcRegion fc_region(double p, int samples) {
  if (p < 0.0 || p > 0.5) throw std::invalid_argument("fc_region: p outside [0, 0.5]");
  if (samples < 2) throw std::invalid_argument("fc_region: need >= 2 samples");
  FcRegion region;
  const double rs_max = 1.0 - binary_entropy(p);
  region.optimal = {rs_max, binary_entropy(p)};
  region.boundary.reserve(std::size_t(samples));
  for (int i = 0; i < samples; ++i) {
    const double rs = rs_max * double(i) / double(samples - 1);
    region.boundary.push_back({rs, 1.0 - rs});
  }
  return region;
}

std::vector<CsPoint> cs_region_mgl(double p, const std::vector<double>& alphas) {
  if (p < 0.0 || p > 0.5) throw std::invalid_argument("cs_region_mgl: p outside [0, 0.5]");
  std::vector<CsPoint> pts;
  pts.reserve(alphas.size());
  for (double a : alphas) {
    if (a < 0.0 || a > 0.5)
      throw std::invalid_argument("cs_region_mgl: alpha outside [0, 0.5]");
    const double conv = bsc_convolve(a, p);
    pts.push_back({a, {1.0 - binary_entropy(conv),
                       binary_entropy(conv) - binary_entropy(a)}});
  }
  return pts;
}

UniquenessStats uniqueness(const std::vector<Bits>& sequences) {
  if (sequences.size() < 2)
    throw std::invalid_argument("uniqueness: need at least two sequences");
  const std::size_t len = sequences.front().size();
  if (len == 0) throw std::invalid_argument("uniqueness: empty sequences");
  for (const Bits& s : sequences)
    if (s.size() != len) throw std::invalid_argument("uniqueness: length mismatch");

  std::vector<double> fhd;
  for (std::size_t a = 0; a < sequences.size(); ++a)
    for (std::size_t b = a + 1; b < sequences.size(); ++b) {
      int dist = 0;
      for (std::size_t i = 0; i < len; ++i)
        dist += (sequences[a][i] ^ sequences[b][i]) & 1u;
      fhd.push_back(double(dist) / double(len));
    }
  UniquenessStats st;
  st.pairs = (long long)(fhd.size());
  long double mean = 0.0L;
  for (double v : fhd) mean += v;
  mean /= fhd.size();
  long double var = 0.0L;
  for (double v : fhd) var += (v - mean) * (v - mean);
  var /= fhd.size();  // population variance across pairs
  st.mean = double(mean);
  st.variance = double(var);
  return st;
}

double avg_crossover(const std::vector<double>& correctness) {
  if (correctness.empty()) throw std::invalid_argument("avg_crossover: empty profile");
  long double acc = 0.0L;
  for (double pc : correctness) {
    if (pc < 0.0 || pc > 1.0)
      throw std::invalid_argument("avg_crossover: correctness outside [0,1]");
    acc += 1.0L - (long double)pc;
  }
  return double(acc / correctness.size());
}

}  // namespace pufkey
