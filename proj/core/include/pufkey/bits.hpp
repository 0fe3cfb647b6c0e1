#pragma once

#include <cstdint>
#include <vector>

namespace pufkey {

// Bit sequences are vectors of 0/1 bytes throughout the library; packing to
// real bytes happens only at file boundaries.
using Bits = std::vector<std::uint8_t>;

// Little-endian-within-byte packing: bit i of the sequence goes to byte i/8,
// bit position i%8. This layout is normative for the helper-data payload.
std::vector<std::uint8_t> pack_bits(const Bits& bits);
Bits unpack_bits(const std::vector<std::uint8_t>& bytes, std::size_t n_bits);

// FNV-1a 64-bit over a byte string; used to fingerprint allocations.
std::uint64_t fnv1a64(const void* data, std::size_t len);

}  // namespace pufkey
