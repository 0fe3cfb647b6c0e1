#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pufkey/bits.hpp"
#include "pufkey/source.hpp"
#include "pufkey/transforms.hpp"

namespace pufkey {

// Equiprobable standard-normal quantizer: intervals (b_{k-1}, b_k] with
// b_k = Phi^{-1}(k / 2^K); b_0 = -inf, b_{2^K} = +inf.
struct Quantizer {
  int bits = 0;
  std::vector<double> boundaries;  // size 2^K + 1 including the infinities

  static Quantizer make(int bits);  // 1 <= bits <= 8
};

// Interval of t under the (b_{k-1}, b_k] rule, in [1, 2^K].
int quantize_value(double t, int bits);

// Binary-reflected Gray label of interval k: (k-1) xor ((k-1)>>1), MSB first.
Bits gray_bits(int interval, int bits);
unsigned gray_code(int interval);

// Joint probability P(j,k) that the enrollment value lands in interval j and
// the re-measurement (enrollment + N(0, sigma_n^2)) lands in interval k.
// Adaptive quadrature per entry, absolute tolerance `tol`, truncation +-8.
Eigen::MatrixXd transition_matrix(int bits, double sigma_n, double tol = 1e-12);

// D(K) = (1/K) * sum_{j,k} P(j,k) * HammingDistance(gray(j), gray(k)).
double hd_metric(int bits, double sigma_n);

// P_c(K) = sum_j P(j,j): probability all K bits of a coefficient survive.
double correctness(int bits, double sigma_n);

struct BitAllocation {
  enum class Metric { FixedBsc, FixedErrors };
  Metric metric = Metric::FixedBsc;
  double p_b = 0.0;       // FixedBsc parameter
  int c_max = 0;          // FixedErrors parameter
  double p_c_bar = 0.0;   // FixedErrors threshold actually used
  std::vector<int> bits;  // per coefficient, coeff_index order (slot 0 = DC = 0)

  int total_bits() const;          // N
  int worst_case_errors() const;   // e = sum of the c_max largest K_i
  int d_min_required() const { return 2 * worst_case_errors() + 1; }
  void validate() const;

  std::string to_json() const;
  static BitAllocation from_json(const std::string& text);
  std::uint64_t digest() const;  // FNV-1a over the canonical serialization
};

// Metric A: K_i = max{K : D(K, sigma_n_i) <= p_b}, capped at `max_bits`;
// DC and unusable coefficients get 0.
BitAllocation allocate_fixed_bsc(const CoefficientStats& stats, double p_b,
                                 int max_bits = 8);

// Smallest P such that P[more than c_max of n_coeffs coefficients err] <=
// target, assuming each is correct independently w.p. P. Bisection to 1e-6.
double correctness_threshold(int c_max, int n_coeffs, double target = 1e-9);

// Metric B: K_i = max{K : P_c(K, sigma_n_i) >= correctness_threshold(c_max,
// L)}, capped at `force_bits` when given (and at 8 always).
BitAllocation allocate_fixed_errors(const CoefficientStats& stats, int c_max,
                                    std::optional<int> force_bits = std::nullopt,
                                    double target = 1e-9);

// S_max = (1 - H_b(p_b)) * n_bits.
double smax(double p_b, int n_bits);

// T_i = (T_i - mu_i)/sigma_i per coefficient; unusable coefficients pass
// through as 0 (they are never quantized downstream).
Eigen::MatrixXd equalize(const Eigen::MatrixXd& coeffs, const CoefficientStats& stats);

// Full chain: transform -> equalize -> quantize -> Gray bits, concatenated in
// ascending coeff_index; coefficients with K_i = 0 are skipped.
Bits extract_bits(const Eigen::MatrixXd& array, const Transform& kind,
                  const CoefficientStats& stats, const BitAllocation& alloc);

}  // namespace pufkey
