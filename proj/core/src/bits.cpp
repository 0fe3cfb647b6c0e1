#include "pufkey/bits.hpp"

#include <stdexcept>

namespace pufkey {

std::vector<std::uint8_t> pack_bits(const Bits& bits) {
  std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) throw std::invalid_argument("pack_bits: non-binary value");
    if (bits[i]) bytes[i / 8] |= std::uint8_t(1u << (i % 8));
  }
  return bytes;
}

Bits unpack_bits(const std::vector<std::uint8_t>& bytes, std::size_t n_bits) {
  if (bytes.size() * 8 < n_bits)
    throw std::invalid_argument("unpack_bits: byte buffer too short");
  Bits bits(n_bits);
  for (std::size_t i = 0; i < n_bits; ++i) bits[i] = (bytes[i / 8] >> (i % 8)) & 1u;
  return bits;
}

std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace pufkey
