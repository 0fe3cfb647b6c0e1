#include "pufkey/commit.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pufkey {

HelperData enroll(const Bits& key, const Bits& x, const Code& code,
                  std::uint64_t alloc_digest) {
  if (int(key.size()) > code.k())
    throw std::invalid_argument("enroll: key longer than code dimension");
  if (int(x.size()) != code.n())
    throw std::invalid_argument("enroll: |x| != code block length");
  Bits padded = key;
  padded.resize(code.k(), 0);
  Bits m = code.encode(padded);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] ^= x[i] & 1u;
  HelperData hd;
  hd.header.code = code.name();
  hd.header.n = code.n();
  hd.header.alloc_digest = alloc_digest;
  hd.payload = std::move(m);
  return hd;
}

ReconstructOutcome reconstruct(const HelperData& helper, const Bits& y,
                               const Code& code, std::uint64_t alloc_digest,
                               int key_bits) {
  // Self-description checks come first; nothing is decoded on a mismatch.
  if (helper.header.version != 1)
    throw std::invalid_argument("reconstruct: unsupported helper-data version");
  if (helper.header.code != code.name())
    throw std::invalid_argument("reconstruct: helper data is for code '" +
                                helper.header.code + "', not '" + code.name() + "'");
  if (helper.header.alloc_digest != alloc_digest)
    throw std::invalid_argument("reconstruct: allocation digest mismatch");
  if (helper.header.n != code.n() || int(helper.payload.size()) != code.n())
    throw std::invalid_argument("reconstruct: helper payload length mismatch");
  if (int(y.size()) != code.n())
    throw std::invalid_argument("reconstruct: |y| != code block length");
  if (key_bits < 0 || key_bits > code.k())
    throw std::invalid_argument("reconstruct: key_bits exceeds code dimension");

  Bits r(code.n());
  for (int i = 0; i < code.n(); ++i) r[i] = (helper.payload[i] ^ y[i]) & 1u;
  DecodeOutcome out = code.decode(r);
  if (out.status != DecodeStatus::Decoded) return {out.status, {}};
  for (int i = key_bits; i < code.k(); ++i)
    if (out.message[i]) return {DecodeStatus::Failure, {}};  // pad must be zero
  out.message.resize(key_bits);
  return {DecodeStatus::Decoded, std::move(out.message)};
}

void write_helper_file(const std::string& path, const HelperData& helper) {
  char digest_hex[17];
  std::snprintf(digest_hex, sizeof digest_hex, "%016llx",
                static_cast<unsigned long long>(helper.header.alloc_digest));
  nlohmann::json j{{"version", helper.header.version},
                   {"code", helper.header.code},
                   {"n", helper.header.n},
                   {"alloc_digest_hex", digest_hex}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "FCS1\n" << j.dump() << "\n";
  const std::vector<std::uint8_t> packed = pack_bits(helper.payload);
  out.write(reinterpret_cast<const char*>(packed.data()),
            std::streamsize(packed.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

HelperData read_helper_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string magic, header_line;
  if (!std::getline(in, magic) || magic != "FCS1")
    throw std::invalid_argument(path + ": not a helper-data file (bad magic)");
  if (!std::getline(in, header_line))
    throw std::invalid_argument(path + ": missing header line");
  nlohmann::json j = nlohmann::json::parse(header_line);
  HelperData hd;
  hd.header.version = j.at("version").get<int>();
  hd.header.code = j.at("code").get<std::string>();
  hd.header.n = j.at("n").get<int>();
  hd.header.alloc_digest =
      std::stoull(j.at("alloc_digest_hex").get<std::string>(), nullptr, 16);
  if (hd.header.n < 0) throw std::invalid_argument(path + ": negative length");
  std::vector<std::uint8_t> packed((hd.header.n + 7) / 8);
  in.read(reinterpret_cast<char*>(packed.data()), std::streamsize(packed.size()));
  if (in.gcount() != std::streamsize(packed.size()))
    throw std::invalid_argument(path + ": truncated payload");
  hd.payload = unpack_bits(packed, std::size_t(hd.header.n));
  return hd;
}

SecrecyReport secrecy_check_exhaustive(const Code& code) {
  if (code.n() > 20)
    throw std::invalid_argument("secrecy check: code too large for enumeration");
  const int n = code.n(), k = code.k();
  const std::size_t nm = std::size_t(1) << n;
  const std::size_t nk = std::size_t(1) << k;
  const double uniform = 1.0 / double(nm);

  SecrecyReport rep;
  rep.uniform_given_each_key = true;
  rep.identical_across_keys = true;
  std::vector<std::uint32_t> first_counts;
  for (std::size_t s = 0; s < nk; ++s) {
    Bits key(k);
    for (int i = 0; i < k; ++i) key[i] = std::uint8_t((s >> i) & 1);
    const Bits cw = code.encode(key);
    std::vector<std::uint32_t> counts(nm, 0);
    for (std::size_t xv = 0; xv < nm; ++xv) {
      std::size_t m = 0;
      for (int i = 0; i < n; ++i) {
        const unsigned bit = (unsigned((xv >> i)) ^ cw[i]) & 1u;
        m |= std::size_t(bit) << i;
      }
      ++counts[m];
    }
    for (std::size_t m = 0; m < nm; ++m) {
      const double err = std::abs(double(counts[m]) / double(nm) - uniform);
      rep.max_prob_error = std::max(rep.max_prob_error, err);
      if (counts[m] != 1) rep.uniform_given_each_key = false;
    }
    if (s == 0)
      first_counts = counts;
    else if (counts != first_counts)
      rep.identical_across_keys = false;
  }
  return rep;
}

EmpiricalSecrecy secrecy_check_empirical(const Code& code, int samples,
                                         CounterRng& rng, bool uniform_x) {
  if (samples <= 0) throw std::invalid_argument("secrecy check: samples must be positive");
  const int n = code.n(), k = code.k();
  // Two fixed, distinct keys: all-zeros and alternating bits.
  Bits key_a(k, 0), key_b(k);
  for (int i = 0; i < k; ++i) key_b[i] = std::uint8_t(i & 1);
  const Bits cw_a = code.encode(key_a), cw_b = code.encode(key_b);

  std::vector<std::int64_t> ones_a(n, 0), ones_b(n, 0);
  for (int trial = 0; trial < samples; ++trial) {
    Bits x(n, 0);
    if (uniform_x)
      for (int i = 0; i < n; ++i) x[i] = std::uint8_t(rng.next_u64() & 1u);
    for (int i = 0; i < n; ++i) {
      ones_a[i] += (cw_a[i] ^ x[i]) & 1u;
      ones_b[i] += (cw_b[i] ^ x[i]) & 1u;
    }
  }
  EmpiricalSecrecy rep;
  for (int i = 0; i < n; ++i) {
    const double pa = double(ones_a[i]) / samples;
    const double pb = double(ones_b[i]) / samples;
    rep.max_bit_bias = std::max({rep.max_bit_bias, std::abs(pa - 0.5), std::abs(pb - 0.5)});
    rep.max_bit_gap = std::max(rep.max_bit_gap, std::abs(pa - pb));
  }
  return rep;
}

}  // namespace pufkey
