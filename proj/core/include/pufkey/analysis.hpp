#pragma once

#include <cstdint>
#include <vector>

#include "pufkey/bits.hpp"

namespace pufkey {

// Secret-key rate / privacy-leakage rate pair, bits per source bit.
struct RatePoint {
  double rs = 0.0;
  double rl = 0.0;
};

// Finite-length reference pair quoted for the 255-bit design; stored for plot
// overlays, not computed.
inline constexpr RatePoint kFiniteLengthReference{0.691, 0.309};

// Rate bookkeeping for a code binding k_used key bits over n source bits.
inline RatePoint rate_point(int k_used, int n) {
  return {double(k_used) / n, 1.0 - double(k_used) / n};
}

// P[X > t], X ~ Binomial(n, p). Log-domain terms, extended-precision sum;
// relative error <= 1e-9 for results >= 1e-15.
double binomial_tail(int n, double p, int t);

// Block-failure estimate for errors-and-erasures bounded-distance decoding of
// an (n, k, d) code over a channel with symbol-error probability p_err and
// symbol-erasure probability p_era. Guaranteed success holds iff 2e + nu < d;
// the sum here conservatively counts the boundary shells too, accumulating
// the exact trinomial mass over all (e, nu) with 2e + nu >= d - 2.
double ee_tail(int n, int d, double p_err, double p_era);

// P[W > t] for W a sum of independent Bernoulli(q_i): DFT of the
// characteristic function, products accumulated in log-magnitude/phase form.
// Throws if any reconstructed mass has imaginary residue above 1e-12.
double poisson_binomial_tail_dftcf(const std::vector<double>& q, int t);

// Same tail by O(n^2) convolution of the Bernoulli masses in extended
// precision; independent oracle for the DFT-CF path.
double poisson_binomial_tail_dp(const std::vector<double>& q, int t);

// Monte Carlo estimate of the RM(1,5) MLD post-decoding channel over BSC(p):
// random messages, per-bit flips, exact MLD; an inner tie is an erasure, a
// confident wrong message an error. Chunked per-seed; the estimate is
// identical for any thread count. threads = 0 picks hardware concurrency.
struct RmChannelEstimate {
  double p_era = 0.0, p_err = 0.0;
  double se_era = 0.0, se_err = 0.0;  // binomial standard errors
  long long trials = 0;
};
RmChannelEstimate rm_channel_mc(double p, long long trials, std::uint64_t seed,
                                int threads = 0);

// Achievable fuzzy-commitment region for a BSC(p) measurement channel:
// R_s in [0, 1 - H_b(p)], R_l >= 1 - R_s; the optimal corner is
// (1 - H_b(p), H_b(p)). `samples` boundary points are returned with R_s
// spaced uniformly on [0, R_s*].
struct FcRegion {
  RatePoint optimal;
  std::vector<RatePoint> boundary;
};
FcRegion fc_region(double p, int samples = 65);

// Chosen-secret region boundary parametrized by BSC(alpha) test channels
// (exactly optimal for a BSC by Mrs. Gerber's lemma):
// R_s(alpha) = 1 - H_b(alpha * p), R_l(alpha) = H_b(alpha * p) - H_b(alpha)
// with a * b the binary convolution a(1-b) + (1-a)b.
struct CsPoint {
  double alpha = 0.0;
  RatePoint rate;
};
std::vector<CsPoint> cs_region_mgl(double p, const std::vector<double>& alphas);

// Fractional Hamming distance over all unordered pairs of device bit
// sequences; exact mean and population variance.
struct UniquenessStats {
  long long pairs = 0;
  double mean = 0.0;
  double variance = 0.0;
};
UniquenessStats uniqueness(const std::vector<Bits>& sequences);

// Average bit-error probability over a per-coefficient correctness profile:
// mean of (1 - P_c,i).
double avg_crossover(const std::vector<double>& correctness);

}  // namespace pufkey
