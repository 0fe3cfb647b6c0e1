#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pufkey/bits.hpp"
#include "pufkey/codes.hpp"
#include "pufkey/rng.hpp"

namespace pufkey {

// Public helper data M = Enc(S) xor X plus the self-describing header that
// lets reconstruction refuse a mismatched code or bit allocation before any
// decoding happens. The header travels over an authenticated, noiseless
// channel; none of it is secret.
struct HelperData {
  struct Header {
    int version = 1;
    std::string code;        // registry name
    int n = 0;               // payload length in bits = code block length
    std::uint64_t alloc_digest = 0;
  } header;
  Bits payload;
};

// Binds `key` (<= k bits, zero-padded at the tail to the code dimension) to
// the enrollment bits x (|x| = n). Throws on length mismatch or an
// analysis-only code.
HelperData enroll(const Bits& key, const Bits& x, const Code& code,
                  std::uint64_t alloc_digest);

struct ReconstructOutcome {
  DecodeStatus status = DecodeStatus::Failure;
  Bits key;  // size key_bits iff status == Decoded

  bool ok() const { return status == DecodeStatus::Decoded; }
};

// Ŝ from R = M xor y. The header must match the caller's code and allocation
// digest exactly (throws before decoding otherwise). Decoder failure, or
// nonzero padding bits after decoding (which also catches some
// miscorrections), yields Failure.
ReconstructOutcome reconstruct(const HelperData& helper, const Bits& y,
                               const Code& code, std::uint64_t alloc_digest,
                               int key_bits = 128);

// File format: "FCS1\n", one UTF-8 JSON header line
// {"version":1,"code":"...","n":...,"alloc_digest_hex":"%016x"}\n, then the
// payload packed little-endian within bytes, zero-padded to a byte boundary.
void write_helper_file(const std::string& path, const HelperData& helper);
HelperData read_helper_file(const std::string& path);

// Exact perfect-secrecy audit for small codes (n <= 20, throws above):
// enumerates every key s and every mask x, and verifies that M | S = s is
// exactly uniform on {0,1}^n and identical across keys, i.e. I(S;M) = 0.
struct SecrecyReport {
  bool uniform_given_each_key = false;
  bool identical_across_keys = false;
  double max_prob_error = 0.0;  // max_s,m |P(M=m|s) - 2^-n|

  bool perfect() const { return uniform_given_each_key && identical_across_keys; }
};
SecrecyReport secrecy_check_exhaustive(const Code& code);

// Sampled per-bit audit for codes too large to enumerate: draws `samples`
// masks per key for two fixed distinct keys. With uniform_x = false the mask
// is degenerate (all zeros), the designed failure case: M then determines the
// codeword and the audit must flag leakage.
struct EmpiricalSecrecy {
  double max_bit_bias = 0.0;  // max over bits, keys of |P̂[M_i = 1] - 1/2|
  double max_bit_gap = 0.0;   // max over bits of |P̂_a[M_i = 1] - P̂_b[M_i = 1]|
};
EmpiricalSecrecy secrecy_check_empirical(const Code& code, int samples,
                                         CounterRng& rng, bool uniform_x = true);

}  // namespace pufkey
