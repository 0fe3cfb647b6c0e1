#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pufkey/quantize.hpp"

namespace pufkey {

// Signed two's-complement value with a declared width; construction and every
// arithmetic step in the datapath model verify representability, so a width
// violation surfaces as an exception instead of silent wraparound.
class FixedWord {
 public:
  FixedWord(std::int32_t value, int width_bits);
  std::int32_t value() const { return value_; }
  int width() const { return width_; }
  static bool fits(std::int64_t value, int width_bits);

 private:
  std::int32_t value_;
  int width_;
};

// Multiplication-free 4-point butterfly
//   y = 1/2 * [x0+x1+x2+x3, x0-x1+x2-x3, x0+x1-x2-x3, x0-x1-x2+x3],
// the 1/2 realized as an arithmetic right shift (rounds toward -infinity for
// odd negative sums). Sums grow by at most 2 bits; the shift takes one back,
// so outputs carry width + 1.
std::array<FixedWord, 4> dwht4p(FixedWord x0, FixedWord x1, FixedWord x2,
                                FixedWord x3);

// 16x16 fixed-point 2D DWHT: four in-place butterfly passes (strides 1, 2, 4,
// 8), each location read and written exactly once per pass. The composite
// equals H X H^T / 16 with H the +-1 Sylvester-Hadamard matrix — i.e. the
// orthonormal 2D DWHT of the input — up to the per-stage shift truncation.
// 16-bit inputs stay within 20 bits throughout (verified at every stage).
using Grid16 = std::array<std::int32_t, 256>;  // row-major
Grid16 dwht2d_fixed(const Grid16& input);

// The pass/index schedule of dwht2d_fixed, emitted as documentation: for each
// butterfly, the four row-major locations it consumes in x0..x3 order.
struct ButterflyQuad {
  int pass = 0;                    // 0..3; stride = 1 << pass
  std::array<int, 4> index{};      // (r,c), (r,c+h), (r+h,c), (r+h,c+h)
};
std::vector<ButterflyQuad> dwht_schedule();

// Minimum counting duration at which a w-bit counter overloads at f_max:
// T_min = (2^w - 1) / f_max.
double counter_overload_time(int width_bits, double f_max_hz);

// True iff a counting window never overloads the counter.
bool counter_window_safe(int width_bits, double f_max_hz, double window_s);

// Quantizer boundary ROM for the equalization-free fixed-point path: for each
// coefficient with K_i >= 1, the 2^{K_i} - 1 boundaries round(mu_i +
// sigma_i * Phi^{-1}(k / 2^{K_i})) in raw datapath units, packed
// coefficient-major in ascending k. Boundaries must fit the 20-bit datapath.
struct RomImage {
  int word_bits = 20;
  std::vector<std::int32_t> words;

  std::size_t total_bytes() const {  // packed size
    return (words.size() * std::size_t(word_bits) + 7) / 8;
  }
};
RomImage quantizer_rom(const BitAllocation& alloc, const CoefficientStats& stats);

// ROM file: one JSON line {"words":...,"word_bits":20}, then each word as 3
// little-endian bytes holding the 20-bit two's-complement value (top 4 bits
// zero).
void write_rom_file(const std::string& path, const RomImage& rom);
RomImage read_rom_file(const std::string& path);

}  // namespace pufkey
