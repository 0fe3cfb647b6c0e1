#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <set>

#include "pufkey/bits.hpp"
#include "pufkey/rng.hpp"

using namespace pufkey;

TEST_CASE("counter rng is deterministic and fork-independent") {
  CounterRng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

  CounterRng base(7);
  CounterRng f0 = base.fork(0), f1 = base.fork(1);
  // fork() must not disturb the parent…
  CHECK(base.counter() == 0);
  // …and distinct streams must diverge immediately.
  int same = 0;
  for (int i = 0; i < 64; ++i) same += (f0.next_u64() == f1.next_u64());
  CHECK(same == 0);

  // Forking twice with the same stream id replays the same sequence.
  CounterRng g0 = base.fork(0);
  CounterRng g1 = base.fork(0);
  for (int i = 0; i < 64; ++i) CHECK(g0.next_u64() == g1.next_u64());
}

TEST_CASE("uniform doubles land in [0,1) with the right mean") {
  CounterRng rng(123);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);  // ~5.5 sigma of the mean estimator
}

TEST_CASE("gaussian moments") {
  CounterRng rng(99);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.next_gaussian();
    s1 += g;
    s2 += g * g;
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("pack/unpack round trip, bit order LSB-of-byte-first") {
  // Bit i lives in byte i/8 at position i%8.
  CHECK(pack_bits(Bits{1, 0, 1}) == std::vector<std::uint8_t>{0b00000101});
  CHECK(unpack_bits(std::vector<std::uint8_t>{0b00000101}, 3) == Bits{1, 0, 1});

  CounterRng rng(5);
  for (int len : {0, 1, 7, 8, 9, 63, 64, 65, 255, 896}) {
    Bits v(len);
    for (auto& b : v) b = std::uint8_t(rng.next_u64() & 1);
    CHECK(unpack_bits(pack_bits(v), len) == v);
  }
  // Unused pad bits in the last byte must be zero.
  const auto packed = pack_bits(Bits{1, 1, 1});
  CHECK(packed.size() == 1);
  CHECK((packed[0] & 0xF8) == 0);
}

TEST_CASE("fnv1a64 reference vectors") {
  // Published FNV-1a 64-bit test values.
  CHECK(fnv1a64(nullptr, 0) == 0xcbf29ce484222325ULL);
  const char* a = "a";
  CHECK(fnv1a64(a, 1) == 0xaf63dc4c8601ec8cULL);
  const char* foobar = "foobar";
  CHECK(fnv1a64(foobar, 6) == 0x85944171f73967e8ULL);
}

TEST_CASE("rng stream ids cover a wide range without collisions") {
  CounterRng base(2026);
  std::set<std::uint64_t> firsts;
  for (std::uint64_t s = 0; s < 512; ++s) firsts.insert(base.fork(s).next_u64());
  CHECK(firsts.size() == 512);
}
