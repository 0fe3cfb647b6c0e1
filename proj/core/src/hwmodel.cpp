#include "pufkey/hwmodel.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pufkey/numeric.hpp"

namespace pufkey {

bool FixedWord::fits(std::int64_t value, int width_bits) {
  if (width_bits < 1 || width_bits > 31) return false;
  const std::int64_t lo = -(std::int64_t(1) << (width_bits - 1));
  const std::int64_t hi = (std::int64_t(1) << (width_bits - 1)) - 1;
  return value >= lo && value <= hi;
}

FixedWord::FixedWord(std::int32_t value, int width_bits)
    : value_(value), width_(width_bits) {
  if (!fits(value, width_bits))
    throw std::overflow_error("FixedWord: value does not fit declared width");
}

namespace {

// Arithmetic >>1: shifts of negative signed values are implementation-reliable
// only since C++20 (two's complement mandated); rounds toward -infinity.
inline std::int32_t ashr1(std::int32_t v) { return v >> 1; }

}  // namespace

std::array<FixedWord, 4> dwht4p(FixedWord x0, FixedWord x1, FixedWord x2,
                                FixedWord x3) {
  const int w = std::max({x0.width(), x1.width(), x2.width(), x3.width()});
  const std::int64_t a = x0.value(), b = x1.value(), c = x2.value(), d = x3.value();
  const std::int64_t s0 = a + b + c + d;
  const std::int64_t s1 = a - b + c - d;
  const std::int64_t s2 = a + b - c - d;
  const std::int64_t s3 = a - b - c + d;
  for (std::int64_t s : {s0, s1, s2, s3})
    if (!FixedWord::fits(s, w + 2))
      throw std::overflow_error("dwht4p: pre-shift sum exceeds width + 2 bits");
  return {FixedWord(ashr1(std::int32_t(s0)), w + 1),
          FixedWord(ashr1(std::int32_t(s1)), w + 1),
          FixedWord(ashr1(std::int32_t(s2)), w + 1),
          FixedWord(ashr1(std::int32_t(s3)), w + 1)};
}

std::vector<ButterflyQuad> dwht_schedule() {
  std::vector<ButterflyQuad> quads;
  quads.reserve(4 * 64);
  for (int pass = 0; pass < 4; ++pass) {
    const int h = 1 << pass;
    for (int r = 0; r < 16; ++r) {
      if (r & h) continue;
      for (int c = 0; c < 16; ++c) {
        if (c & h) continue;
        ButterflyQuad q;
        q.pass = pass;
        q.index = {16 * r + c, 16 * r + (c + h), 16 * (r + h) + c,
                   16 * (r + h) + (c + h)};
        quads.push_back(q);
      }
    }
  }
  return quads;
}

Grid16 dwht2d_fixed(const Grid16& input) {
  for (std::int32_t v : input)
    if (!FixedWord::fits(v, 16))
      throw std::overflow_error("dwht2d_fixed: input exceeds 16 bits");
  Grid16 grid = input;
  int width = 16;
  for (int pass = 0; pass < 4; ++pass) {
    const int h = 1 << pass;
    for (int r = 0; r < 16; ++r) {
      if (r & h) continue;
      for (int c = 0; c < 16; ++c) {
        if (c & h) continue;
        const auto y = dwht4p(FixedWord(grid[16 * r + c], width),
                              FixedWord(grid[16 * r + c + h], width),
                              FixedWord(grid[16 * (r + h) + c], width),
                              FixedWord(grid[16 * (r + h) + c + h], width));
        grid[16 * r + c] = y[0].value();
        grid[16 * r + c + h] = y[1].value();
        grid[16 * (r + h) + c] = y[2].value();
        grid[16 * (r + h) + c + h] = y[3].value();
      }
    }
    ++width;  // net one bit of growth per pass; 20 after the fourth
  }
  return grid;
}

double counter_overload_time(int width_bits, double f_max_hz) {
  if (width_bits < 1 || width_bits > 62)
    throw std::invalid_argument("counter_overload_time: bad width");
  if (f_max_hz <= 0.0)
    throw std::invalid_argument("counter_overload_time: frequency must be positive");
  return double((std::int64_t(1) << width_bits) - 1) / f_max_hz;
}

bool counter_window_safe(int width_bits, double f_max_hz, double window_s) {
  return window_s < counter_overload_time(width_bits, f_max_hz);
}

RomImage quantizer_rom(const BitAllocation& alloc, const CoefficientStats& stats) {
  alloc.validate();
  if (alloc.bits.size() != stats.mu.size())
    throw std::invalid_argument("quantizer_rom: allocation/stats size mismatch");
  RomImage rom;
  for (std::size_t i = 0; i < alloc.bits.size(); ++i) {
    const int k_bits = alloc.bits[i];
    if (k_bits < 1) continue;
    const int levels = 1 << k_bits;
    for (int k = 1; k < levels; ++k) {
      const double b = stats.mu[i] + stats.sigma[i] * norm_quantile(double(k) / levels);
      const long long word = std::llround(b);
      if (!FixedWord::fits(word, rom.word_bits))
        throw std::range_error("quantizer_rom: boundary for coefficient " +
                               std::to_string(i + 1) + " exceeds 20-bit range");
      rom.words.push_back(std::int32_t(word));
    }
  }
  return rom;
}

void write_rom_file(const std::string& path, const RomImage& rom) {
  nlohmann::json j{{"words", rom.words.size()}, {"word_bits", rom.word_bits}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump() << "\n";
  for (std::int32_t w : rom.words) {
    const std::uint32_t u = std::uint32_t(w) & 0xFFFFFu;  // 20-bit two's complement
    const char bytes[3] = {char(u & 0xFF), char((u >> 8) & 0xFF), char((u >> 16) & 0x0F)};
    out.write(bytes, 3);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

RomImage read_rom_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument(path + ": missing header");
  nlohmann::json j = nlohmann::json::parse(header);
  RomImage rom;
  rom.word_bits = j.at("word_bits").get<int>();
  if (rom.word_bits != 20) throw std::invalid_argument(path + ": unsupported word width");
  const std::size_t count = j.at("words").get<std::size_t>();
  rom.words.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    unsigned char bytes[3];
    in.read(reinterpret_cast<char*>(bytes), 3);
    if (in.gcount() != 3) throw std::invalid_argument(path + ": truncated word table");
    if (bytes[2] & 0xF0u) throw std::invalid_argument(path + ": nonzero padding bits");
    std::uint32_t u = std::uint32_t(bytes[0]) | (std::uint32_t(bytes[1]) << 8) |
                      (std::uint32_t(bytes[2]) << 16);
    if (u & 0x80000u) u |= 0xFFF00000u;  // sign-extend from bit 19
    rom.words.push_back(std::int32_t(u));
  }
  return rom;
}

}  // namespace pufkey
