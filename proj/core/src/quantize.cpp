#include "pufkey/quantize.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "pufkey/numeric.hpp"

namespace pufkey {

using nlohmann::json;

namespace {

constexpr int kMaxBits = 8;
constexpr double kTrunc = 8.0;  // quadrature truncation, standard deviations

void check_bits(int bits) {
  if (bits < 1 || bits > kMaxBits)
    throw std::invalid_argument("quantizer: bits must be in [1,8]");
}

}  // namespace

Quantizer Quantizer::make(int bits) {
  check_bits(bits);
  Quantizer q;
  q.bits = bits;
  const int m = 1 << bits;
  q.boundaries.resize(m + 1);
  q.boundaries[0] = -std::numeric_limits<double>::infinity();
  q.boundaries[m] = std::numeric_limits<double>::infinity();
  for (int k = 1; k < m; ++k) q.boundaries[k] = norm_quantile(double(k) / m);
  return q;
}

int quantize_value(double t, int bits) {
  check_bits(bits);
  const int m = 1 << bits;
  // Interval k is (b_{k-1}, b_k]; scan is fine for m <= 256 but bisect anyway.
  const Quantizer q = Quantizer::make(bits);
  int lo = 1, hi = m;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (t <= q.boundaries[mid]) hi = mid;
    else lo = mid + 1;
  }
  return lo;
}

unsigned gray_code(int interval) {
  const unsigned v = unsigned(interval - 1);
  return v ^ (v >> 1);
}

Bits gray_bits(int interval, int bits) {
  check_bits(bits);
  if (interval < 1 || interval > (1 << bits))
    throw std::invalid_argument("gray_bits: interval out of range");
  const unsigned g = gray_code(interval);
  Bits out(bits);
  for (int i = 0; i < bits; ++i) out[i] = (g >> (bits - 1 - i)) & 1u;  // MSB first
  return out;
}

namespace {

// P[re-measurement lands in interval k | enrollment value t]: the noise tail
// weight of (b_{k-1} - t, b_k - t] scaled by sigma_n.
double landing_prob(const std::vector<double>& b, int k, double t, double s) {
  const double lo = b[k - 1], hi = b[k];
  const double q_lo = std::isinf(lo) ? 1.0 : norm_tail((lo - t) / s);
  const double q_hi = std::isinf(hi) ? 0.0 : norm_tail((hi - t) / s);
  return q_lo - q_hi;
}

struct Entry {
  double value;
};

// One transition-matrix entry by adaptive quadrature over interval j.
double entry_jk(const Quantizer& q, int j, int k, double s, double tol) {
  const double a = std::max(q.boundaries[j - 1], -kTrunc);
  const double b = std::min(q.boundaries[j], kTrunc);
  if (a >= b) return 0.0;
  return integrate(
      [&](double t) { return norm_pdf(t) * landing_prob(q.boundaries, k, t, s); }, a,
      b, tol);
}

}  // namespace

Eigen::MatrixXd transition_matrix(int bits, double sigma_n, double tol) {
  check_bits(bits);
  if (sigma_n < 0.0) throw std::invalid_argument("transition_matrix: negative sigma_n");
  const int m = 1 << bits;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, m);
  if (sigma_n == 0.0) {
    for (int j = 0; j < m; ++j) p(j, j) = 1.0 / m;
    return p;
  }
  const Quantizer q = Quantizer::make(bits);
  for (int j = 1; j <= m; ++j)
    for (int k = 1; k <= m; ++k) p(j - 1, k - 1) = entry_jk(q, j, k, sigma_n, tol);
  return p;
}

namespace {

// Shared integrand core for D(K) and P_c(K): per enrollment interval j,
// integrate phi(t) * f(t) where f folds the noise landing probabilities.
// Evaluating interval-by-interval keeps every integrand smooth.
template <typename F>
double per_interval_sum(int bits, double s, F weight) {
  const Quantizer q = Quantizer::make(bits);
  const int m = 1 << bits;
  double total = 0.0;
  for (int j = 1; j <= m; ++j) {
    const double a = std::max(q.boundaries[j - 1], -kTrunc);
    const double b = std::min(q.boundaries[j], kTrunc);
    if (a >= b) continue;
    total += integrate(
        [&](double t) {
          // Only intervals whose boundaries lie within the +-8 sigma noise
          // window contribute; everything else is below the tolerance.
          double acc = 0.0;
          for (int k = 1; k <= m; ++k) {
            const double w = weight(j, k);
            if (w == 0.0) continue;
            const double lo = q.boundaries[k - 1], hi = q.boundaries[k];
            if (!std::isinf(lo) && (lo - t) / s > kTrunc) continue;
            if (!std::isinf(hi) && (hi - t) / s < -kTrunc) continue;
            acc += w * landing_prob(q.boundaries, k, t, s);
          }
          return norm_pdf(t) * acc;
        },
        a, b, 1e-12);
  }
  return total;
}

}  // namespace

double hd_metric(int bits, double sigma_n) {
  check_bits(bits);
  if (sigma_n < 0.0) throw std::invalid_argument("hd_metric: negative sigma_n");
  if (sigma_n == 0.0) return 0.0;
  const double sum = per_interval_sum(bits, sigma_n, [&](int j, int k) {
    return double(std::popcount(gray_code(j) ^ gray_code(k)));
  });
  return sum / bits;
}

double correctness(int bits, double sigma_n) {
  check_bits(bits);
  if (sigma_n < 0.0) throw std::invalid_argument("correctness: negative sigma_n");
  if (sigma_n == 0.0) return 1.0;
  return per_interval_sum(bits, sigma_n,
                          [](int j, int k) { return j == k ? 1.0 : 0.0; });
}

int BitAllocation::total_bits() const {
  int n = 0;
  for (std::size_t i = 1; i < bits.size(); ++i) n += bits[i];
  return n;
}

int BitAllocation::worst_case_errors() const {
  std::vector<int> sorted(bits.begin(), bits.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<int>());
  int e = 0;
  for (int i = 0; i < c_max && i < int(sorted.size()); ++i) e += sorted[i];
  return e;
}

void BitAllocation::validate() const {
  if (bits.empty()) throw std::invalid_argument("allocation: empty");
  if (bits[0] != 0) throw std::invalid_argument("allocation: DC coefficient must carry 0 bits");
  for (int k : bits)
    if (k < 0 || k > kMaxBits) throw std::invalid_argument("allocation: K_i out of [0,8]");
  if (metric == Metric::FixedErrors && c_max < 0)
    throw std::invalid_argument("allocation: negative c_max");
}

namespace {

// One scan shared by both allocators: largest K in [0, cap] still satisfying
// `ok`, exploiting that the metrics are monotone in K.
template <typename Ok>
int max_bits_satisfying(int cap, Ok ok) {
  int best = 0;
  for (int k = 1; k <= cap; ++k) {
    if (!ok(k)) break;
    best = k;
  }
  return best;
}

template <typename PerCoeff>
void parallel_over_coeffs(int L, PerCoeff fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n_workers = std::min<unsigned>(hw, unsigned(L));
  if (n_workers <= 1) {
    for (int i = 0; i < L; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (unsigned w = 0; w < n_workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < L; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

BitAllocation allocate_fixed_bsc(const CoefficientStats& stats, double p_b,
                                 int max_bits) {
  stats.validate();
  if (!(p_b > 0.0 && p_b < 0.5))
    throw std::invalid_argument("allocate_fixed_bsc: p_b must be in (0, 0.5)");
  if (max_bits < 0 || max_bits > kMaxBits)
    throw std::invalid_argument("allocate_fixed_bsc: cap out of [0,8]");
  BitAllocation alloc;
  alloc.metric = BitAllocation::Metric::FixedBsc;
  alloc.p_b = p_b;
  alloc.bits.assign(stats.size(), 0);
  parallel_over_coeffs(stats.size(), [&](int i) {
    if (!stats.usable[i]) return;
    if (stats.sigma_n[i] == 0.0) {
      alloc.bits[i] = max_bits;  // noiseless coefficient: every bit survives
      return;
    }
    alloc.bits[i] = max_bits_satisfying(
        max_bits, [&](int k) { return hd_metric(k, stats.sigma_n[i]) <= p_b; });
  });
  return alloc;
}

double correctness_threshold(int c_max, int n_coeffs, double target) {
  if (c_max < 0 || n_coeffs < 0 || c_max > n_coeffs)
    throw std::invalid_argument("correctness_threshold: need 0 <= c_max <= n_coeffs");
  if (!(target > 0.0)) throw std::invalid_argument("correctness_threshold: target <= 0");
  if (c_max == n_coeffs) return 0.0;

  // Tail of Binomial(n, 1-P) above c_max, in extended precision.
  auto tail = [&](double p_c) -> long double {
    const long double lp = std::log(static_cast<long double>(p_c));
    const long double lq = std::log1p(-static_cast<long double>(p_c));
    long double s = 0.0L;
    for (int c = c_max + 1; c <= n_coeffs; ++c) {
      const long double lt = static_cast<long double>(log_choose(n_coeffs, c)) +
                             c * lq + (n_coeffs - c) * lp;
      s += expl(lt);
    }
    return s;
  };

  double lo = 0.0, hi = 1.0;  // tail(lo) > target >= tail(hi) (tail(1) = 0)
  if (tail(std::nextafter(0.0, 1.0)) <= target) return 0.0;
  while (hi - lo > 1e-7) {  // one digit beyond the contract's 1e-6
    const double mid = 0.5 * (lo + hi);
    if (tail(mid) <= target) hi = mid;
    else lo = mid;
  }
  return hi;
}

BitAllocation allocate_fixed_errors(const CoefficientStats& stats, int c_max,
                                    std::optional<int> force_bits, double target) {
  stats.validate();
  const int L = stats.size();
  if (c_max < 0 || c_max > L)
    throw std::invalid_argument("allocate_fixed_errors: c_max out of range");
  int cap = kMaxBits;
  if (force_bits) {
    if (*force_bits < 0 || *force_bits > kMaxBits)
      throw std::invalid_argument("allocate_fixed_errors: force_bits out of [0,8]");
    cap = *force_bits;
  }
  BitAllocation alloc;
  alloc.metric = BitAllocation::Metric::FixedErrors;
  alloc.c_max = c_max;
  alloc.p_c_bar = correctness_threshold(c_max, L, target);
  alloc.bits.assign(L, 0);
  parallel_over_coeffs(L, [&](int i) {
    if (!stats.usable[i]) return;
    if (stats.sigma_n[i] == 0.0) {
      alloc.bits[i] = cap;
      return;
    }
    alloc.bits[i] = max_bits_satisfying(cap, [&](int k) {
      return correctness(k, stats.sigma_n[i]) >= alloc.p_c_bar;
    });
  });
  return alloc;
}

double smax(double p_b, int n_bits) {
  if (p_b < 0.0 || p_b > 0.5) throw std::invalid_argument("smax: p_b outside [0, 0.5]");
  if (n_bits < 0) throw std::invalid_argument("smax: negative N");
  return (1.0 - binary_entropy(p_b)) * n_bits;
}

Eigen::MatrixXd equalize(const Eigen::MatrixXd& coeffs, const CoefficientStats& stats) {
  stats.validate();
  if (coeffs.rows() != stats.rows || coeffs.cols() != stats.cols)
    throw std::invalid_argument("equalize: array does not match stats dimensions");
  Eigen::MatrixXd out(coeffs.rows(), coeffs.cols());
  for (int r = 0; r < coeffs.rows(); ++r)
    for (int c = 0; c < coeffs.cols(); ++c) {
      const int idx = r * stats.cols + c;
      out(r, c) = stats.usable[idx] ? (coeffs(r, c) - stats.mu[idx]) / stats.sigma[idx]
                                    : 0.0;
    }
  return out;
}

Bits extract_bits(const Eigen::MatrixXd& array, const Transform& kind,
                  const CoefficientStats& stats, const BitAllocation& alloc) {
  stats.validate();
  alloc.validate();
  if (int(alloc.bits.size()) != stats.size())
    throw std::invalid_argument("extract_bits: allocation does not match stats");
  for (int i = 0; i < stats.size(); ++i)
    if (alloc.bits[i] > 0 && !stats.usable[i])
      throw std::invalid_argument("extract_bits: bits assigned to an unusable coefficient");
  const Eigen::MatrixXd eq = equalize(kind.forward(array), stats);
  Bits out;
  out.reserve(alloc.total_bits());
  for (int i = 0; i < stats.size(); ++i) {
    const int k = alloc.bits[i];
    if (k == 0) continue;
    const int interval = quantize_value(eq(i / stats.cols, i % stats.cols), k);
    const Bits g = gray_bits(interval, k);
    out.insert(out.end(), g.begin(), g.end());
  }
  return out;
}

std::string BitAllocation::to_json() const {
  validate();
  json doc;
  doc["metric"] = metric == Metric::FixedBsc ? "fixed-bsc" : "fixed-errors";
  if (metric == Metric::FixedBsc) {
    doc["p_b"] = p_b;
  } else {
    doc["c_max"] = c_max;
    doc["p_c_bar"] = p_c_bar;
  }
  doc["K"] = bits;
  doc["N"] = total_bits();
  if (metric == Metric::FixedErrors) {
    doc["e"] = worst_case_errors();
    doc["d_min_required"] = d_min_required();
  }
  return doc.dump(2) + "\n";
}

BitAllocation BitAllocation::from_json(const std::string& text) {
  json doc = json::parse(text);
  BitAllocation alloc;
  const std::string metric = doc.at("metric").get<std::string>();
  if (metric == "fixed-bsc") {
    alloc.metric = Metric::FixedBsc;
    alloc.p_b = doc.at("p_b").get<double>();
  } else if (metric == "fixed-errors") {
    alloc.metric = Metric::FixedErrors;
    alloc.c_max = doc.at("c_max").get<int>();
    alloc.p_c_bar = doc.at("p_c_bar").get<double>();
  } else {
    throw std::invalid_argument("allocation json: unknown metric");
  }
  alloc.bits = doc.at("K").get<std::vector<int>>();
  alloc.validate();
  if (doc.contains("N") && doc.at("N").get<int>() != alloc.total_bits())
    throw std::invalid_argument("allocation json: stored N does not match K");
  return alloc;
}

std::uint64_t BitAllocation::digest() const {
  // Canonical form: metric tag, parameter, and the K vector.
  std::ostringstream canon;
  if (metric == Metric::FixedBsc) {
    canon << "fixed-bsc;p_b=" << p_b << ';';
  } else {
    canon << "fixed-errors;c_max=" << c_max << ";p_c_bar=" << p_c_bar << ';';
  }
  for (int k : bits) canon << k << ',';
  const std::string s = canon.str();
  return fnv1a64(s.data(), s.size());
}

}  // namespace pufkey
