#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "pufkey/codes.hpp"
#include "pufkey/rng.hpp"

using namespace pufkey;

namespace {

Bits random_bits(int n, CounterRng& rng) {
  Bits v(n);
  for (auto& b : v) b = std::uint8_t(rng.next_u64() & 1);
  return v;
}

// Flip `weight` distinct positions of `word`.
void flip_random(Bits& word, int weight, CounterRng& rng) {
  std::vector<int> pos(word.size());
  std::iota(pos.begin(), pos.end(), 0);
  for (int i = 0; i < weight; ++i) {
    const int j = i + int(rng.next_u64() % (pos.size() - i));
    std::swap(pos[i], pos[j]);
    word[pos[i]] ^= 1;
  }
}

int weight(const Bits& v) { return int(std::count(v.begin(), v.end(), 1)); }

}  // namespace

TEST_CASE("galois field tables") {
  const GaloisField& f64 = GaloisField::gf64();
  const GaloisField& f256 = GaloisField::gf256();
  CHECK(f64.order() == 63);
  CHECK(f256.order() == 255);

  // Reduction of alpha^m by the fixed polynomials.
  CHECK(f64.pow_alpha(6) == 0x03);    // x^6 = x + 1
  CHECK(f256.pow_alpha(8) == 0x1D);   // x^8 = x^4 + x^3 + x^2 + 1
  CHECK(f64.pow_alpha(63) == 1);
  CHECK(f256.pow_alpha(255) == 1);
  CHECK(f256.pow_alpha(-1) == f256.inv(f256.pow_alpha(1)));

  for (const GaloisField* f : {&f64, &f256}) {
    for (int a = 1; a <= f->order(); ++a) {
      CHECK(f->mul(a, f->inv(a)) == 1);
      CHECK(f->pow_alpha(f->log_alpha(a)) == a);
      CHECK(f->div(a, a) == 1);
    }
    CHECK(f->mul(0, 5) == 0);
    CHECK(f->add(7, 7) == 0);
  }

  CounterRng rng(1);
  for (int i = 0; i < 200; ++i) {
    const int a = int(rng.next_u64() % 256), b = int(rng.next_u64() % 256),
              c = int(rng.next_u64() % 256);
    CHECK(f256.mul(a, f256.add(b, c)) == f256.add(f256.mul(a, b), f256.mul(a, c)));
    CHECK(f256.mul(a, b) == f256.mul(b, a));
  }
}

TEST_CASE("field constructor rejects a non-primitive modulus") {
  // x^4 + x + 1 generates GF(16); x^4 + x^3 + x^2 + x + 1 is irreducible but
  // its root has order 5, so the log table cannot be built.
  CHECK_NOTHROW((void)GaloisField(4, 0x13));
  CHECK_THROWS((void)GaloisField(4, 0x1F));
}

TEST_CASE("repetition code") {
  const RepetitionCode rep(3);
  CHECK(rep.encode(Bits{1}) == Bits{1, 1, 1});
  CHECK(rep.encode(Bits{0}) == Bits{0, 0, 0});
  // Majority over all 8 received words.
  for (int w = 0; w < 8; ++w) {
    Bits r{std::uint8_t(w & 1), std::uint8_t((w >> 1) & 1), std::uint8_t((w >> 2) & 1)};
    const auto out = rep.decode(r);
    REQUIRE(out.ok());
    CHECK(out.message == Bits{std::uint8_t(weight(r) >= 2)});
  }
  // Even length has a genuine tie.
  const RepetitionCode rep2(2);
  CHECK(rep2.decode(Bits{0, 1}).status == DecodeStatus::Erasure);
  CHECK(rep2.decode(Bits{1, 1}).ok());
}

TEST_CASE("reed-muller codeword weights") {
  const ReedMullerCode rm;
  std::set<int> weights;
  for (int m = 0; m < 64; ++m) {
    Bits msg(6);
    for (int i = 0; i < 6; ++i) msg[i] = (m >> i) & 1;
    const Bits cw = rm.encode(msg);
    REQUIRE(int(cw.size()) == 32);
    weights.insert(weight(cw));
    // First-order structure: bit p = m0 + <m_1..5, p>.
    if (m == 0) CHECK(weight(cw) == 0);
    if (m == 1) CHECK(weight(cw) == 32);  // complement of zero
  }
  CHECK(weights == std::set<int>{0, 16, 32});
}

TEST_CASE("reed-muller exact decoding within half the distance") {
  const ReedMullerCode rm;
  CounterRng rng(2);
  for (int trial = 0; trial < 10000; ++trial) {
    const Bits msg = random_bits(6, rng);
    Bits r = rm.encode(msg);
    flip_random(r, 7, rng);
    const auto out = rm.decode_mld(r);
    REQUIRE(out.ok());
    CHECK(out.message == msg);
  }
  // Clean decode of all 64 codewords.
  for (int m = 0; m < 64; ++m) {
    Bits msg(6);
    for (int i = 0; i < 6; ++i) msg[i] = (m >> i) & 1;
    CHECK(rm.decode_mld(rm.encode(msg)).message == msg);
  }
}

TEST_CASE("reed-muller tie reports erasure") {
  const ReedMullerCode rm;
  Bits msg(6, 0);
  msg[1] = 1;  // a weight-16 codeword
  const Bits cw = rm.encode(msg);
  // Flip 8 of its 16 ones: the result is at distance 8 from both this
  // codeword and the all-zero codeword, a genuine minimum-distance tie.
  Bits r = cw;
  int flipped = 0;
  for (int p = 0; p < 32 && flipped < 8; ++p) {
    if (r[p] == 1) {
      r[p] = 0;
      ++flipped;
    }
  }
  CHECK(rm.decode_mld(r).status == DecodeStatus::Erasure);
}

TEST_CASE("reed-solomon systematic encoding") {
  const ReedSolomonCode rs(28, 22);
  CHECK(rs.d() == 7);
  CounterRng rng(3);
  ReedSolomonCode::Symbols msg(22);
  for (auto& s : msg) s = int(rng.next_u64() % 64);
  const auto cw = rs.encode(msg);
  REQUIRE(int(cw.size()) == 28);
  for (int i = 0; i < 22; ++i) CHECK(cw[6 + i] == msg[i]);

  // All six syndromes of a codeword vanish.
  const GaloisField& gf = GaloisField::gf64();
  for (int i = 1; i <= 6; ++i) {
    int s = 0;
    for (int j = 0; j < 28; ++j)
      if (cw[j]) s = gf.add(s, gf.mul(cw[j], gf.pow_alpha((i * j) % 63)));
    CHECK(s == 0);
  }
}

TEST_CASE("reed-solomon errors-and-erasures decoding inside the radius") {
  const ReedSolomonCode rs(28, 22);
  CounterRng rng(4);
  const std::vector<std::uint8_t> none(28, 0);

  for (int trial = 0; trial < 500; ++trial) {
    ReedSolomonCode::Symbols msg(22);
    for (auto& s : msg) s = int(rng.next_u64() % 64);
    auto word = rs.encode(msg);

    // Random errata with 2e + nu <= 6.
    const int nu = int(rng.next_u64() % 7);
    const int e = int(rng.next_u64() % ((6 - nu) / 2 + 1));
    std::vector<int> pos(28);
    std::iota(pos.begin(), pos.end(), 0);
    std::vector<std::uint8_t> erased(28, 0);
    for (int i = 0; i < nu + e; ++i)
      std::swap(pos[i], pos[i + int(rng.next_u64() % (28 - i))]);
    for (int i = 0; i < nu; ++i) {
      erased[pos[i]] = 1;
      word[pos[i]] = int(rng.next_u64() % 64);  // garbage; value must not matter
    }
    for (int i = nu; i < nu + e; ++i)
      word[pos[i]] ^= 1 + int(rng.next_u64() % 63);  // guaranteed wrong

    const auto out = rs.decode_ee(word, erased);
    REQUIRE(out.status == DecodeStatus::Decoded);
    CHECK(out.message == msg);
  }

  // Pure-erasure capacity: nu = 6 corrects, nu = 7 fails.
  ReedSolomonCode::Symbols msg(22, 17);
  auto word = rs.encode(msg);
  std::vector<std::uint8_t> erased(28, 0);
  for (int i = 0; i < 6; ++i) erased[4 * i] = 1;
  CHECK(rs.decode_ee(word, erased).status == DecodeStatus::Decoded);
  erased[25] = 1;
  CHECK(rs.decode_ee(word, erased).status == DecodeStatus::Failure);
}

TEST_CASE("reed-solomon never claims success past the radius") {
  // 2e + nu = 7: outcome may be Failure or a different codeword's message,
  // but never the original presented as a guaranteed correction.
  const ReedSolomonCode rs(28, 22);
  CounterRng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    ReedSolomonCode::Symbols msg(22);
    for (auto& s : msg) s = int(rng.next_u64() % 64);
    auto word = rs.encode(msg);
    std::vector<std::uint8_t> erased(28, 0);
    std::vector<int> pos(28);
    std::iota(pos.begin(), pos.end(), 0);
    for (int i = 0; i < 4; ++i)
      std::swap(pos[i], pos[i + int(rng.next_u64() % (28 - i))]);
    erased[pos[0]] = 1;
    for (int i = 1; i < 4; ++i) word[pos[i]] ^= 1 + int(rng.next_u64() % 63);
    const auto out = rs.decode_ee(word, erased);
    CHECK((out.status != DecodeStatus::Decoded || out.message != msg));
  }
}

TEST_CASE("bch generator polynomial") {
  const BchCode bch(255, 131, 18);
  CHECK(bch.design_distance() == 37);
  const auto& g = bch.generator();
  REQUIRE(int(g.size()) == 125);  // degree n - k = 124
  CHECK(g[0] == 1);
  CHECK(g[124] == 1);
  // g(alpha^i) = 0 for all design roots i = 1..36.
  const GaloisField& gf = GaloisField::gf256();
  for (int i = 1; i <= 36; ++i) {
    int v = 0;
    for (int j = 124; j >= 0; --j) v = gf.add(gf.mul(v, gf.pow_alpha(i)), g[j]);
    CHECK(v == 0);
  }
}

TEST_CASE("bch corrects up to 18 errors") {
  const BchCode bch(255, 131, 18);
  CounterRng rng(6);
  for (int trial = 0; trial < 1000; ++trial) {
    const Bits msg = random_bits(131, rng);
    Bits cw = bch.encode(msg);
    REQUIRE(int(cw.size()) == 255);
    // Systematic: message occupies the high-degree positions.
    for (int i = 0; i < 131; ++i) REQUIRE(cw[124 + i] == msg[i]);
    flip_random(cw, int(rng.next_u64() % 19), rng);
    const auto out = bch.decode_bmdd(cw);
    REQUIRE(out.ok());
    CHECK(out.message == msg);
  }
}

TEST_CASE("bch cannot correct its way back from 19 errors") {
  const BchCode bch(255, 131, 18);
  CounterRng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Bits msg = random_bits(131, rng);
    Bits cw = bch.encode(msg);
    flip_random(cw, 19, rng);
    const auto out = bch.decode_bmdd(cw);
    // A locator of degree <= 18 cannot cover 19 flips: never the original.
    CHECK((out.status != DecodeStatus::Decoded || out.message != msg));
  }
}

TEST_CASE("code registry parameters") {
  struct Row {
    const char* name;
    int n, k, d, t;
    bool constructive;
  };
  const Row rows[] = {
      {"rep3", 3, 1, 3, 1, true},
      {"rm32_6", 32, 6, 16, 7, true},
      {"rs28_22", 168, 132, 7, 3, true},
      {"bch255_131", 255, 131, 37, 18, true},
      {"rm32_6+rs28_22", 896, 132, 112, 3, true},
      {"rep3+ebch256_132", 768, 132, 108, 17, false},
  };
  for (const auto& r : rows) {
    const Code c = Code::from_name(r.name);
    CAPTURE(r.name);
    CHECK(c.name() == r.name);
    CHECK(c.n() == r.n);
    CHECK(c.k() == r.k);
    CHECK(c.d() == r.d);
    CHECK(c.t() == r.t);
    CHECK(c.constructive() == r.constructive);
  }
  CHECK(Code::registry_names().size() == 6);
  CHECK_THROWS_AS((void)Code::from_name("hamming"), std::invalid_argument);
}

TEST_CASE("analysis-only entry refuses to encode or decode") {
  const Code c = Code::from_name("rep3+ebch256_132");
  try {
    (void)c.encode(Bits(132, 0));
    FAIL("encode should throw");
  } catch (const std::logic_error& e) {
    CHECK(std::string(e.what()).find("analysis-only") != std::string::npos);
  }
  CHECK_THROWS_AS((void)c.decode(Bits(768, 0)), std::logic_error);
}

TEST_CASE("concatenated code survives three ruined inner blocks") {
  const Code cc = Code::from_name("rm32_6+rs28_22");
  CounterRng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const Bits msg = random_bits(132, rng);
    Bits cw = cc.encode(msg);
    REQUIRE(int(cw.size()) == 896);

    // Replace three whole inner blocks with noise. Each damaged block turns
    // into a correct symbol, an outer erasure, or an outer error; any mix is
    // within the outer errors-and-erasures radius.
    std::set<int> blocks;
    while (blocks.size() < 3) blocks.insert(int(rng.next_u64() % 28));
    for (int b : blocks)
      for (int i = 0; i < 32; ++i) cw[32 * b + i] = std::uint8_t(rng.next_u64() & 1);

    const auto out = cc.decode(cw);
    REQUIRE(out.ok());
    CHECK(out.message == msg);
  }
}

TEST_CASE("concatenated code handles scattered single-bit noise") {
  const Code cc = Code::from_name("rm32_6+rs28_22");
  CounterRng rng(9);
  const Bits msg = random_bits(132, rng);
  Bits cw = cc.encode(msg);
  // One flip in each of seven different blocks: every inner decode still
  // lands on its codeword, so the outer sees a clean word.
  for (int b = 0; b < 7; ++b) cw[32 * (3 * b) + int(rng.next_u64() % 32)] ^= 1;
  const auto out = cc.decode(cw);
  REQUIRE(out.ok());
  CHECK(out.message == msg);
}

TEST_CASE("codec rejects wrong lengths") {
  const Code bch = Code::from_name("bch255_131");
  CHECK_THROWS_AS((void)bch.encode(Bits(130, 0)), std::invalid_argument);
  CHECK_THROWS_AS((void)bch.decode(Bits(254, 0)), std::invalid_argument);
}
