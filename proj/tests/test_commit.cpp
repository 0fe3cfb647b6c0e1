#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>

#include "pufkey/codes.hpp"
#include "pufkey/commit.hpp"
#include "pufkey/rng.hpp"

using namespace pufkey;

namespace {

Bits random_bits(int n, CounterRng& rng) {
  Bits v(n);
  for (auto& b : v) b = std::uint8_t(rng.next_u64() & 1);
  return v;
}

struct TempFile {
  std::string path;
  explicit TempFile(const char* name)
      : path(std::string("commit_test_") + name + ".bin") {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("mask of zeros exposes the codeword, key of zeros exposes the mask") {
  const Code code = Code::from_name("bch255_131");
  CounterRng rng(1);
  const Bits key = random_bits(128, rng);

  const HelperData h0 = enroll(key, Bits(255, 0), code, 0x1234);
  // With x = 0 the payload is the codeword of the zero-padded key.
  Bits padded = key;
  padded.resize(131, 0);
  CHECK(h0.payload == code.encode(padded));
  CHECK(h0.header.version == 1);
  CHECK(h0.header.code == "bch255_131");
  CHECK(h0.header.n == 255);
  CHECK(h0.header.alloc_digest == 0x1234);

  // Linear code: the zero key maps to the zero codeword.
  const Bits x = random_bits(255, rng);
  CHECK(enroll(Bits(128, 0), x, code, 0).payload == x);
}

TEST_CASE("payload xor mask is always a codeword") {
  for (const char* name : {"rep3", "rm32_6", "bch255_131", "rm32_6+rs28_22"}) {
    const Code code = Code::from_name(name);
    CounterRng rng(2);
    const int kb = std::min(code.k(), 128);
    const Bits key = random_bits(kb, rng);
    const Bits x = random_bits(code.n(), rng);
    const HelperData h = enroll(key, x, code, 7);
    Bits m = h.payload;
    for (int i = 0; i < code.n(); ++i) m[i] ^= x[i];
    const auto out = code.decode(m);
    REQUIRE(out.ok());
    Bits padded = key;
    padded.resize(code.k(), 0);
    CHECK(out.message == padded);
  }
}

TEST_CASE("reconstruction round trip under bounded noise") {
  const Code code = Code::from_name("bch255_131");
  CounterRng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const Bits key = random_bits(128, rng);
    const Bits x = random_bits(255, rng);
    const HelperData h = enroll(key, x, code, 99);

    Bits y = x;
    const int e = int(rng.next_u64() % 19);
    std::vector<int> pos(255);
    std::iota(pos.begin(), pos.end(), 0);
    for (int i = 0; i < e; ++i) {
      const int j = i + int(rng.next_u64() % (255 - i));
      std::swap(pos[i], pos[j]);
      y[pos[i]] ^= 1;
    }

    const auto out = reconstruct(h, y, code, 99);
    REQUIRE(out.status == DecodeStatus::Decoded);
    CHECK(out.key == key);
  }
}

TEST_CASE("a remeasurement with half the bits wrong never yields the key") {
  const Code code = Code::from_name("bch255_131");
  CounterRng rng(4);
  const Bits key = random_bits(128, rng);
  const Bits x = random_bits(255, rng);
  const HelperData h = enroll(key, x, code, 0);
  int silent_wrong = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Bits y = x;
    std::vector<int> pos(255);
    std::iota(pos.begin(), pos.end(), 0);
    for (int i = 0; i < 127; ++i) {
      const int j = i + int(rng.next_u64() % (255 - i));
      std::swap(pos[i], pos[j]);
      y[pos[i]] ^= 1;
    }
    const auto out = reconstruct(h, y, code, 0);
    // 127 flips cannot be walked back by an 18-error decoder: whatever comes
    // out, it is not the enrolled key presented as genuine.
    if (out.status == DecodeStatus::Decoded && out.key == key) ++silent_wrong;
  }
  CHECK(silent_wrong == 0);
}

TEST_CASE("metadata mismatches are refused before any decoding") {
  const Code bch = Code::from_name("bch255_131");
  const Code rep = Code::from_name("rep3");
  CounterRng rng(5);
  const Bits key = random_bits(128, rng);
  const Bits x = random_bits(255, rng);
  const HelperData h = enroll(key, x, bch, 42);

  CHECK_THROWS_AS((void)reconstruct(h, x, bch, 41), std::invalid_argument);  // digest
  CHECK_THROWS_AS((void)reconstruct(h, x, rep, 42), std::invalid_argument);  // code name
  CHECK_THROWS_AS((void)reconstruct(h, Bits(254, 0), bch, 42), std::invalid_argument);
  HelperData bad = h;
  bad.header.version = 2;
  CHECK_THROWS_AS((void)reconstruct(bad, x, bch, 42), std::invalid_argument);
  // Asking for more key bits than the code carries.
  CHECK_THROWS_AS((void)reconstruct(h, x, bch, 42, 132), std::invalid_argument);
  // Enrollment with an oversized key or wrong mask length.
  CHECK_THROWS_AS((void)enroll(random_bits(132, rng), x, bch, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)enroll(key, Bits(17, 0), bch, 0), std::invalid_argument);
  // Analysis-only codes cannot enroll.
  CHECK_THROWS((void)enroll(key, Bits(768, 0), Code::from_name("rep3+ebch256_132"), 0));
}

TEST_CASE("nonzero padding after decode is treated as failure") {
  // Hand-build helper data whose underlying message has a 1 above the key
  // bits; a clean decode must still be rejected.
  const Code code = Code::from_name("bch255_131");
  Bits padded(131, 0);
  padded[130] = 1;  // pad bit, outside key_bits = 128
  CounterRng rng(6);
  const Bits x = random_bits(255, rng);
  HelperData h;
  h.header.version = 1;
  h.header.code = "bch255_131";
  h.header.n = 255;
  h.header.alloc_digest = 0;
  h.payload = code.encode(padded);
  for (int i = 0; i < 255; ++i) h.payload[i] ^= x[i];
  const auto out = reconstruct(h, x, code, 0);
  CHECK(out.status == DecodeStatus::Failure);
}

TEST_CASE("helper file round trip") {
  const Code code = Code::from_name("rm32_6+rs28_22");
  CounterRng rng(7);
  const Bits key = random_bits(128, rng);
  const Bits x = random_bits(896, rng);
  const HelperData h = enroll(key, x, code, 0xDEADBEEFCAFEF00DULL);

  TempFile f("roundtrip");
  write_helper_file(f.path, h);
  const HelperData back = read_helper_file(f.path);
  CHECK(back.header.version == h.header.version);
  CHECK(back.header.code == h.header.code);
  CHECK(back.header.n == h.header.n);
  CHECK(back.header.alloc_digest == h.header.alloc_digest);
  CHECK(back.payload == h.payload);

  // Wrong magic is refused.
  {
    std::fstream io(f.path, std::ios::in | std::ios::out | std::ios::binary);
    io.put('X');
  }
  CHECK_THROWS_AS((void)read_helper_file(f.path), std::invalid_argument);

  // Truncated payload is refused.
  write_helper_file(f.path, h);
  {
    std::ifstream in(f.path, std::ios::binary);
    std::string all((std::istreambuf_iterator<char>(in)), {});
    std::ofstream out(f.path, std::ios::binary | std::ios::trunc);
    out.write(all.data(), std::streamsize(all.size() - 4));
  }
  CHECK_THROWS_AS((void)read_helper_file(f.path), std::invalid_argument);
}

TEST_CASE("exhaustive secrecy audit on the repetition code") {
  const SecrecyReport rep = secrecy_check_exhaustive(Code::from_name("rep3"));
  CHECK(rep.uniform_given_each_key);
  CHECK(rep.identical_across_keys);
  CHECK(rep.max_prob_error == 0.0);
  CHECK(rep.perfect());
  // Exhaustive enumeration is capped at n = 20.
  CHECK_THROWS_AS((void)secrecy_check_exhaustive(Code::from_name("rm32_6")),
                  std::invalid_argument);
}

TEST_CASE("empirical secrecy: uniform mask hides the key, reused mask leaks") {
  const Code rm = Code::from_name("rm32_6");
  CounterRng rng(8);
  const EmpiricalSecrecy good = secrecy_check_empirical(rm, 1000000, rng);
  CHECK(good.max_bit_bias < 0.01);
  CHECK(good.max_bit_gap < 0.01);

  // Degenerate mask (all zeros): the payload is the bare codeword and the
  // per-bit statistics collapse to 0/1 — maximal bias flags the leak.
  CounterRng rng2(9);
  const EmpiricalSecrecy bad = secrecy_check_empirical(rm, 10000, rng2, false);
  CHECK(bad.max_bit_bias == doctest::Approx(0.5).epsilon(1e-12));
}
