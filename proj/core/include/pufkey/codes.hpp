#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pufkey/bits.hpp"

namespace pufkey {

// GF(2^m) with log/antilog tables. Fixed primitive polynomials:
// m=6: x^6 + x + 1 (0x43), m=8: x^8 + x^4 + x^3 + x^2 + 1 (0x11D).
class GaloisField {
 public:
  GaloisField(int m, unsigned primitive_poly);
  static const GaloisField& gf64();
  static const GaloisField& gf256();

  int m() const { return m_; }
  int order() const { return n_; }  // multiplicative order 2^m - 1

  int add(int a, int b) const { return a ^ b; }
  int mul(int a, int b) const;
  int div(int a, int b) const;
  int inv(int a) const;
  int pow_alpha(int e) const;  // alpha^e, exponent reduced mod order
  int log_alpha(int a) const;  // a != 0

 private:
  int m_, n_;
  std::vector<int> exp_, log_;
};

enum class DecodeStatus { Decoded, Erasure, Failure };

struct DecodeOutcome {
  DecodeStatus status = DecodeStatus::Failure;
  Bits message;  // size k iff status == Decoded

  static DecodeOutcome decoded(Bits m) { return {DecodeStatus::Decoded, std::move(m)}; }
  static DecodeOutcome erasure() { return {DecodeStatus::Erasure, {}}; }
  static DecodeOutcome failure() { return {DecodeStatus::Failure, {}}; }
  bool ok() const { return status == DecodeStatus::Decoded; }
};

// (n, 1, n) repetition with majority-vote decoding (ML for odd n).
class RepetitionCode {
 public:
  explicit RepetitionCode(int n);
  int n() const { return n_; }
  int k() const { return 1; }
  int d() const { return n_; }
  Bits encode(const Bits& message) const;
  DecodeOutcome decode(const Bits& received) const;

 private:
  int n_;
};

// First-order Reed-Muller RM(1,5) = (32, 6, 16). Message [m0, m1..m5]:
// codeword bit at position p is m0 xor <(m1..m5), bits of p> with m1 the
// least-significant coordinate. Decoding is exact minimum-distance decoding
// via the fast Hadamard correlation; a tie at the maximum correlation
// magnitude (two or more codewords at minimum distance) yields Erasure.
class ReedMullerCode {
 public:
  int n() const { return 32; }
  int k() const { return 6; }
  int d() const { return 16; }
  Bits encode(const Bits& message) const;
  DecodeOutcome decode_mld(const Bits& received) const;
};

// Reed-Solomon over GF(2^6), shortened from the (63, 57, 7) mother code by
// fixing the 35 leading (highest-position) information symbols to zero.
// Transmitted layout: positions 0..5 parity, 6..n-1 message (systematic).
class ReedSolomonCode {
 public:
  ReedSolomonCode(int n, int k);  // d = n - k + 1
  int n() const { return n_; }
  int k() const { return k_; }
  int d() const { return n_ - k_ + 1; }

  using Symbols = std::vector<int>;
  struct SymbolsOutcome {
    DecodeStatus status = DecodeStatus::Failure;
    Symbols message;
  };

  Symbols encode(const Symbols& message) const;
  // Errors-and-erasures bounded-distance decoding; guaranteed correct iff
  // 2e + nu < d. Erased positions' symbol values are ignored.
  SymbolsOutcome decode_ee(const Symbols& received,
                           const std::vector<std::uint8_t>& erased) const;

 private:
  int n_, k_;
  const GaloisField& gf_;
  Symbols gen_;  // generator polynomial, ascending powers
};

// Narrow-sense primitive binary BCH over GF(2^8) locators; (255, 131, >=37),
// t = 18. Systematic: message bits sit in the codeword's high-degree
// coefficients (bit i of the codeword vector is the coefficient of x^i;
// message occupies positions n-k .. n-1).
class BchCode {
 public:
  BchCode(int n, int k, int t);
  int n() const { return n_; }
  int k() const { return k_; }
  int t() const { return t_; }
  int design_distance() const { return 2 * t_ + 1; }
  const std::vector<std::uint8_t>& generator() const { return gen_; }  // ascending

  Bits encode(const Bits& message) const;
  DecodeOutcome decode_bmdd(const Bits& received) const;

 private:
  int n_, k_, t_;
  const GaloisField& gf_;
  std::vector<std::uint8_t> gen_;
};

// Registry-level code handle used by the commitment scheme and the CLI.
// Names: rep3, rm32_6, rs28_22, bch255_131, rm32_6+rs28_22,
// rep3+ebch256_132 (analysis-only: carries parameters but no codec).
class Code {
 public:
  static Code from_name(const std::string& name);
  static std::vector<std::string> registry_names();

  const std::string& name() const { return name_; }
  int n() const { return n_; }  // block length in bits
  int k() const { return k_; }  // dimension in bits
  int d() const { return d_; }
  // Guaranteed-correctable errors for the analysis layer (floor((d-1)/2) for
  // the plain codes; the concatenations report their outer capability).
  int t() const { return t_; }
  bool constructive() const { return constructive_; }

  Bits encode(const Bits& message) const;       // throws for analysis-only codes
  DecodeOutcome decode(const Bits& received) const;

  struct Impl;  // opaque codec vtable

 private:
  std::shared_ptr<const Impl> impl_;
  std::string name_;
  int n_ = 0, k_ = 0, d_ = 0, t_ = 0;
  bool constructive_ = false;
};

}  // namespace pufkey
