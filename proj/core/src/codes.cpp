#include "pufkey/codes.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdlib>
#include <set>
#include <stdexcept>

namespace pufkey {

GaloisField::GaloisField(int m, unsigned primitive_poly) : m_(m), n_((1 << m) - 1) {
  if (m < 2 || m > 16) throw std::invalid_argument("GaloisField: unsupported m");
  exp_.assign(2 * n_, 0);
  log_.assign(n_ + 1, -1);
  unsigned x = 1;
  for (int i = 0; i < n_; ++i) {
    exp_[i] = int(x);
    log_[x] = i;
    x <<= 1;
    if (x >> m) x ^= primitive_poly;
    // Returning to 1 before exhausting the group means ord(alpha) < 2^m - 1,
    // e.g. an irreducible-but-not-primitive modulus; the tables would be junk.
    if (x == 1 && i != n_ - 1)
      throw std::invalid_argument("GaloisField: polynomial is not primitive");
  }
  if (x != 1) throw std::invalid_argument("GaloisField: polynomial is not primitive");
  for (int i = 0; i < n_; ++i) exp_[n_ + i] = exp_[i];
}

const GaloisField& GaloisField::gf64() {
  static const GaloisField f(6, 0x43);  // x^6 + x + 1
  return f;
}

const GaloisField& GaloisField::gf256() {
  static const GaloisField f(8, 0x11D);  // x^8 + x^4 + x^3 + x^2 + 1
  return f;
}

int GaloisField::mul(int a, int b) const {
  if (a == 0 || b == 0) return 0;
  return exp_[log_[a] + log_[b]];
}

int GaloisField::div(int a, int b) const {
  if (b == 0) throw std::domain_error("GaloisField: division by zero");
  if (a == 0) return 0;
  return exp_[log_[a] - log_[b] + n_];
}

int GaloisField::inv(int a) const {
  if (a == 0) throw std::domain_error("GaloisField: zero has no inverse");
  return exp_[n_ - log_[a]];
}

int GaloisField::pow_alpha(int e) const { return exp_[((e % n_) + n_) % n_]; }

int GaloisField::log_alpha(int a) const {
  if (a == 0) throw std::domain_error("GaloisField: log of zero");
  return log_[a];
}

// ---------------------------------------------------------------- repetition

RepetitionCode::RepetitionCode(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("repetition: n must be positive");
}

Bits RepetitionCode::encode(const Bits& message) const {
  if (message.size() != 1) throw std::invalid_argument("repetition: message must be 1 bit");
  return Bits(n_, message[0] & 1u);
}

DecodeOutcome RepetitionCode::decode(const Bits& received) const {
  if (int(received.size()) != n_)
    throw std::invalid_argument("repetition: received length mismatch");
  int ones = 0;
  for (auto b : received) ones += b & 1u;
  if (2 * ones == n_) return DecodeOutcome::erasure();  // even n tie
  return DecodeOutcome::decoded({std::uint8_t(2 * ones > n_ ? 1 : 0)});
}

// --------------------------------------------------------------- Reed-Muller

Bits ReedMullerCode::encode(const Bits& message) const {
  if (message.size() != 6) throw std::invalid_argument("rm: message must be 6 bits");
  const unsigned m0 = message[0] & 1u;
  unsigned j = 0;
  for (int i = 1; i <= 5; ++i) j |= (message[i] & 1u) << (i - 1);
  Bits cw(32);
  for (unsigned p = 0; p < 32; ++p)
    cw[p] = std::uint8_t(m0 ^ (std::popcount(j & p) & 1u));
  return cw;
}

DecodeOutcome ReedMullerCode::decode_mld(const Bits& received) const {
  if (received.size() != 32) throw std::invalid_argument("rm: received must be 32 bits");
  std::array<int, 32> w;
  for (int p = 0; p < 32; ++p) w[p] = (received[p] & 1u) ? -1 : 1;
  // In-place fast Hadamard transform: W_j = sum_p (-1)^{<j,p>} x_p.
  for (int h = 1; h < 32; h <<= 1)
    for (int i = 0; i < 32; i += h << 1)
      for (int p = i; p < i + h; ++p) {
        const int a = w[p], b = w[p + h];
        w[p] = a + b;
        w[p + h] = a - b;
      }
  int best = 0;
  for (int j = 0; j < 32; ++j) best = std::max(best, std::abs(w[j]));
  int arg = -1, hits = 0;
  for (int j = 0; j < 32; ++j)
    if (std::abs(w[j]) == best) {
      ++hits;
      arg = j;
    }
  if (best == 0 || hits > 1) return DecodeOutcome::erasure();
  Bits msg(6);
  msg[0] = std::uint8_t(w[arg] < 0 ? 1 : 0);
  for (int i = 1; i <= 5; ++i) msg[i] = std::uint8_t((arg >> (i - 1)) & 1);
  return DecodeOutcome::decoded(std::move(msg));
}

// ------------------------------------------------------------- Berlekamp-Massey

namespace {

// Minimal LFSR Lambda (Lambda[0] = 1) with
//   sum_{i=0..L} Lambda[i] * f[j-i] = 0  for j in [start, f.size()),
// terms with j - i < 0 omitted. Returns Lambda; *out_len gets L.
std::vector<int> berlekamp_massey(const GaloisField& gf, const std::vector<int>& f,
                                  int start, int* out_len) {
  std::vector<int> lambda{1}, prev{1};
  int L = 0, shift = 1, prev_delta = 1;
  for (int j = start; j < int(f.size()); ++j) {
    int delta = f[j];
    for (int i = 1; i <= L && i < int(lambda.size()); ++i)
      if (j - i >= 0) delta ^= gf.mul(lambda[i], f[j - i]);
    if (delta == 0) {
      ++shift;
      continue;
    }
    const int coef = gf.div(delta, prev_delta);
    std::vector<int> updated = lambda;
    if (int(updated.size()) < int(prev.size()) + shift)
      updated.resize(prev.size() + shift, 0);
    for (int i = 0; i < int(prev.size()); ++i)
      updated[i + shift] ^= gf.mul(coef, prev[i]);
    if (2 * L <= j - start) {
      prev = lambda;
      prev_delta = delta;
      L = j - start + 1 - L;
      shift = 1;
    } else {
      ++shift;
    }
    lambda = std::move(updated);
  }
  *out_len = L;
  lambda.resize(L + 1, 0);
  return lambda;
}

int poly_eval(const GaloisField& gf, const std::vector<int>& p, int x) {
  int acc = 0;
  for (int i = int(p.size()) - 1; i >= 0; --i) acc = gf.add(gf.mul(acc, x), p[i]);
  return acc;
}

std::vector<int> poly_mul(const GaloisField& gf, const std::vector<int>& a,
                          const std::vector<int>& b) {
  std::vector<int> out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      out[i + j] ^= gf.mul(a[i], b[j]);
  }
  return out;
}

// Solve A e = s over the field by Gaussian elimination; returns false if
// singular. A is square, row-major.
bool gf_solve(const GaloisField& gf, std::vector<std::vector<int>> a,
              std::vector<int> s, std::vector<int>* out) {
  const int n = int(s.size());
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r)
      if (a[r][col] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) return false;
    std::swap(a[col], a[pivot]);
    std::swap(s[col], s[pivot]);
    const int inv = gf.inv(a[col][col]);
    for (int c = col; c < n; ++c) a[col][c] = gf.mul(a[col][c], inv);
    s[col] = gf.mul(s[col], inv);
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const int factor = a[r][col];
      for (int c = col; c < n; ++c) a[r][c] ^= gf.mul(factor, a[col][c]);
      s[r] ^= gf.mul(factor, s[col]);
    }
  }
  *out = std::move(s);
  return true;
}

}  // namespace

// -------------------------------------------------------------- Reed-Solomon

ReedSolomonCode::ReedSolomonCode(int n, int k) : n_(n), k_(k), gf_(GaloisField::gf64()) {
  if (k <= 0 || n <= k || n > gf_.order())
    throw std::invalid_argument("rs: need 0 < k < n <= 63");
  // Narrow-sense generator of the (63, 63-(n-k)) mother code:
  // g(x) = prod_{i=1..n-k} (x - alpha^i).
  gen_ = {1};
  for (int i = 1; i <= n - k; ++i) gen_ = poly_mul(gf_, gen_, {gf_.pow_alpha(i), 1});
}

ReedSolomonCode::Symbols ReedSolomonCode::encode(const Symbols& message) const {
  if (int(message.size()) != k_) throw std::invalid_argument("rs: message length mismatch");
  for (int s : message)
    if (s < 0 || s > gf_.order()) throw std::invalid_argument("rs: symbol out of field");
  const int r = n_ - k_;
  // Systematic: codeword positions [0, r) parity, [r, n) message. Long
  // division of message(x) * x^r by the generator.
  Symbols cw(n_, 0);
  for (int i = 0; i < k_; ++i) cw[r + i] = message[i];
  Symbols rem(cw.begin(), cw.end());
  for (int i = n_ - 1; i >= r; --i) {
    const int coef = rem[i];
    if (coef == 0) continue;
    for (int j = 0; j <= r; ++j) rem[i - r + j] ^= gf_.mul(coef, gen_[j]);
  }
  for (int i = 0; i < r; ++i) cw[i] = rem[i];
  return cw;
}

ReedSolomonCode::SymbolsOutcome ReedSolomonCode::decode_ee(
    const Symbols& received, const std::vector<std::uint8_t>& erased) const {
  if (int(received.size()) != n_ || int(erased.size()) != n_)
    throw std::invalid_argument("rs: received/erasure length mismatch");
  const int r = n_ - k_;  // number of syndromes (= d - 1)

  Symbols word = received;
  std::vector<int> erased_pos;
  for (int i = 0; i < n_; ++i)
    if (erased[i]) {
      erased_pos.push_back(i);
      word[i] = 0;  // erased values carry no information
    }
  const int nu = int(erased_pos.size());
  if (nu > r) return {DecodeStatus::Failure, {}};

  auto syndromes = [&](const Symbols& w) {
    std::vector<int> s(r, 0);
    for (int i = 1; i <= r; ++i)
      for (int j = 0; j < n_; ++j)
        if (w[j] != 0) s[i - 1] ^= gf_.mul(w[j], gf_.pow_alpha(i * j));
    return s;
  };

  const std::vector<int> synd = syndromes(word);
  const bool clean = std::all_of(synd.begin(), synd.end(), [](int v) { return v == 0; });
  if (clean && nu == 0)
    return {DecodeStatus::Decoded, Symbols(word.begin() + r, word.end())};

  // Erasure locator Gamma(x) = prod (1 - alpha^p x).
  std::vector<int> gamma{1};
  for (int p : erased_pos) gamma = poly_mul(gf_, gamma, {1, gf_.pow_alpha(p)});

  // Forney syndromes f = S(x) * Gamma(x) mod x^r; BM over f[nu..r) finds the
  // error locator on top of the known erasures.
  std::vector<int> f = poly_mul(gf_, synd, gamma);
  f.resize(r, 0);
  int n_err = 0;
  std::vector<int> lambda = berlekamp_massey(gf_, f, nu, &n_err);
  if (2 * n_err > r - nu) return {DecodeStatus::Failure, {}};

  std::vector<int> psi = poly_mul(gf_, lambda, gamma);  // errata locator
  while (psi.size() > 1 && psi.back() == 0) psi.pop_back();
  const int n_errata = int(psi.size()) - 1;

  // Chien search over the mother code's positions; the shortened (virtual)
  // positions are structurally zero, so a root there means miscorrection.
  std::vector<int> pos;
  for (int p = 0; p < gf_.order(); ++p)
    if (poly_eval(gf_, psi, gf_.pow_alpha(-p)) == 0) {
      if (p >= n_) return {DecodeStatus::Failure, {}};
      pos.push_back(p);
    }
  if (int(pos.size()) != n_errata) return {DecodeStatus::Failure, {}};

  if (n_errata > 0) {
    // Magnitudes from the syndrome equations sum_j e_j X_j^i = S_i.
    std::vector<std::vector<int>> a(n_errata, std::vector<int>(n_errata));
    std::vector<int> rhs(n_errata);
    for (int i = 0; i < n_errata; ++i) {
      for (int j = 0; j < n_errata; ++j) a[i][j] = gf_.pow_alpha((i + 1) * pos[j]);
      rhs[i] = synd[i];
    }
    std::vector<int> mag;
    if (!gf_solve(gf_, std::move(a), std::move(rhs), &mag))
      return {DecodeStatus::Failure, {}};
    for (int j = 0; j < n_errata; ++j) word[pos[j]] ^= mag[j];
  }

  const std::vector<int> recheck = syndromes(word);
  if (!std::all_of(recheck.begin(), recheck.end(), [](int v) { return v == 0; }))
    return {DecodeStatus::Failure, {}};
  return {DecodeStatus::Decoded, Symbols(word.begin() + r, word.end())};
}

// ----------------------------------------------------------------------- BCH

BchCode::BchCode(int n, int k, int t) : n_(n), k_(k), t_(t), gf_(GaloisField::gf256()) {
  if (n != gf_.order())
    throw std::invalid_argument("bch: only the primitive length 255 is supported");
  // Generator = lcm of minimal polynomials of alpha^1 .. alpha^{2t}.
  std::set<int> covered;
  std::vector<std::uint8_t> gen{1};
  for (int e = 1; e <= 2 * t; ++e) {
    if (covered.count(e)) continue;
    std::vector<int> coset;
    int c = e;
    do {
      coset.push_back(c);
      covered.insert(c);
      c = (2 * c) % gf_.order();
    } while (c != e);
    // Minimal polynomial of the coset over GF(2); coefficients land in {0,1}.
    std::vector<int> mp{1};
    for (int root : coset) mp = poly_mul(gf_, mp, {gf_.pow_alpha(root), 1});
    std::vector<std::uint8_t> next(gen.size() + mp.size() - 1, 0);
    for (std::size_t i = 0; i < mp.size(); ++i) {
      if (mp[i] == 0) continue;
      if (mp[i] != 1) throw std::logic_error("bch: minimal polynomial not binary");
      for (std::size_t j = 0; j < gen.size(); ++j) next[i + j] ^= gen[j];
    }
    gen = std::move(next);
  }
  gen_ = std::move(gen);
  if (int(gen_.size()) - 1 != n - k)
    throw std::invalid_argument("bch: generator degree does not equal n - k");
}

Bits BchCode::encode(const Bits& message) const {
  if (int(message.size()) != k_) throw std::invalid_argument("bch: message length mismatch");
  const int r = n_ - k_;
  Bits cw(n_, 0);
  for (int i = 0; i < k_; ++i) cw[r + i] = message[i] & 1u;
  // Remainder of message(x) * x^r modulo the generator.
  Bits rem = cw;
  for (int i = n_ - 1; i >= r; --i) {
    if (!rem[i]) continue;
    for (int j = 0; j <= r; ++j) rem[i - r + j] ^= gen_[j];
  }
  for (int i = 0; i < r; ++i) cw[i] = rem[i];
  return cw;
}

DecodeOutcome BchCode::decode_bmdd(const Bits& received) const {
  if (int(received.size()) != n_)
    throw std::invalid_argument("bch: received length mismatch");
  std::vector<int> synd(2 * t_, 0);
  bool clean = true;
  for (int i = 1; i <= 2 * t_; ++i) {
    int s = 0;
    for (int j = 0; j < n_; ++j)
      if (received[j]) s ^= gf_.pow_alpha(i * j);
    synd[i - 1] = s;
    clean = clean && s == 0;
  }
  Bits word = received;
  if (!clean) {
    int n_err = 0;
    std::vector<int> lambda = berlekamp_massey(gf_, synd, 0, &n_err);
    if (n_err > t_) return DecodeOutcome::failure();
    std::vector<int> pos;
    for (int p = 0; p < n_; ++p)
      if (poly_eval(gf_, lambda, gf_.pow_alpha(-p)) == 0) pos.push_back(p);
    if (int(pos.size()) != n_err) return DecodeOutcome::failure();
    for (int p : pos) word[p] ^= 1u;
  }
  return DecodeOutcome::decoded(Bits(word.begin() + (n_ - k_), word.end()));
}

// ------------------------------------------------------------------ registry

namespace {

int bits_to_symbol(const Bits& bits, std::size_t off, int m) {
  int s = 0;
  for (int i = 0; i < m; ++i) s |= (bits[off + i] & 1u) << i;  // little-endian
  return s;
}

void symbol_to_bits(int s, int m, Bits* out) {
  for (int i = 0; i < m; ++i) out->push_back(std::uint8_t((s >> i) & 1));
}

}  // namespace

struct Code::Impl {
  virtual ~Impl() = default;
  virtual Bits encode(const Bits&) const = 0;
  virtual DecodeOutcome decode(const Bits&) const = 0;
};

namespace {

struct RepImpl : Code::Impl {
  RepetitionCode code;
  explicit RepImpl(int n) : code(n) {}
  Bits encode(const Bits& m) const override { return code.encode(m); }
  DecodeOutcome decode(const Bits& r) const override { return code.decode(r); }
};

struct RmImpl : Code::Impl {
  ReedMullerCode code;
  Bits encode(const Bits& m) const override { return code.encode(m); }
  DecodeOutcome decode(const Bits& r) const override { return code.decode_mld(r); }
};

struct RsBitsImpl : Code::Impl {
  ReedSolomonCode code{28, 22};
  Bits encode(const Bits& m) const override {
    ReedSolomonCode::Symbols msg(code.k());
    for (int i = 0; i < code.k(); ++i) msg[i] = bits_to_symbol(m, 6 * i, 6);
    const auto cw = code.encode(msg);
    Bits out;
    out.reserve(6 * cw.size());
    for (int s : cw) symbol_to_bits(s, 6, &out);
    return out;
  }
  DecodeOutcome decode(const Bits& r) const override {
    ReedSolomonCode::Symbols recv(code.n());
    for (int i = 0; i < code.n(); ++i) recv[i] = bits_to_symbol(r, 6 * i, 6);
    const auto out = code.decode_ee(recv, std::vector<std::uint8_t>(code.n(), 0));
    if (out.status != DecodeStatus::Decoded) return DecodeOutcome::failure();
    Bits msg;
    msg.reserve(6 * out.message.size());
    for (int s : out.message) symbol_to_bits(s, 6, &msg);
    return DecodeOutcome::decoded(std::move(msg));
  }
};

struct BchImpl : Code::Impl {
  BchCode code{255, 131, 18};
  Bits encode(const Bits& m) const override { return code.encode(m); }
  DecodeOutcome decode(const Bits& r) const override { return code.decode_bmdd(r); }
};

// RM(1,5) inner over each GF(2^6) symbol of the shortened RS outer code.
struct RmRsImpl : Code::Impl {
  ReedMullerCode inner;
  ReedSolomonCode outer{28, 22};
  Bits encode(const Bits& m) const override {
    ReedSolomonCode::Symbols msg(outer.k());
    for (int i = 0; i < outer.k(); ++i) msg[i] = bits_to_symbol(m, 6 * i, 6);
    const auto cw = outer.encode(msg);
    Bits out;
    out.reserve(32 * cw.size());
    for (int s : cw) {
      Bits sym;
      symbol_to_bits(s, 6, &sym);
      const Bits block = inner.encode(sym);
      out.insert(out.end(), block.begin(), block.end());
    }
    return out;
  }
  DecodeOutcome decode(const Bits& r) const override {
    ReedSolomonCode::Symbols recv(outer.n(), 0);
    std::vector<std::uint8_t> erased(outer.n(), 0);
    for (int i = 0; i < outer.n(); ++i) {
      const Bits block(r.begin() + 32 * i, r.begin() + 32 * (i + 1));
      const DecodeOutcome inner_out = inner.decode_mld(block);
      if (inner_out.status == DecodeStatus::Decoded)
        recv[i] = bits_to_symbol(inner_out.message, 0, 6);
      else
        erased[i] = 1;  // inner tie becomes an outer erasure
    }
    const auto out = outer.decode_ee(recv, erased);
    if (out.status != DecodeStatus::Decoded) return DecodeOutcome::failure();
    Bits msg;
    msg.reserve(6 * out.message.size());
    for (int s : out.message) symbol_to_bits(s, 6, &msg);
    return DecodeOutcome::decoded(std::move(msg));
  }
};

struct AnalysisOnlyImpl : Code::Impl {
  Bits encode(const Bits&) const override {
    throw std::logic_error("code: no constructive codec (analysis-only)");
  }
  DecodeOutcome decode(const Bits&) const override {
    throw std::logic_error("code: no constructive codec (analysis-only)");
  }
};

}  // namespace

Code Code::from_name(const std::string& name) {
  Code c;
  c.name_ = name;
  if (name == "rep3") {
    c.impl_ = std::make_shared<RepImpl>(3);
    c.n_ = 3, c.k_ = 1, c.d_ = 3, c.t_ = 1;
    c.constructive_ = true;
  } else if (name == "rm32_6") {
    c.impl_ = std::make_shared<RmImpl>();
    c.n_ = 32, c.k_ = 6, c.d_ = 16, c.t_ = 7;
    c.constructive_ = true;
  } else if (name == "rs28_22") {
    c.impl_ = std::make_shared<RsBitsImpl>();
    c.n_ = 168, c.k_ = 132, c.d_ = 7, c.t_ = 3;  // d, t in symbols
    c.constructive_ = true;
  } else if (name == "bch255_131") {
    c.impl_ = std::make_shared<BchImpl>();
    c.n_ = 255, c.k_ = 131, c.d_ = 37, c.t_ = 18;
    c.constructive_ = true;
  } else if (name == "rm32_6+rs28_22") {
    c.impl_ = std::make_shared<RmRsImpl>();
    c.n_ = 896, c.k_ = 132, c.d_ = 112, c.t_ = 3;  // d = d_out * d_in; t = outer
    c.constructive_ = true;
  } else if (name == "rep3+ebch256_132") {
    // Extended-BCH outer (256, 132, 36) + rep3 inner; parameters only.
    c.impl_ = std::make_shared<AnalysisOnlyImpl>();
    c.n_ = 768, c.k_ = 132, c.d_ = 108, c.t_ = 17;  // t = outer

    c.constructive_ = false;
  } else {
    throw std::invalid_argument("unknown code name: " + name);
  }
  return c;
}

std::vector<std::string> Code::registry_names() {
  return {"rep3",       "rm32_6",         "rs28_22",
          "bch255_131", "rm32_6+rs28_22", "rep3+ebch256_132"};
}

Bits Code::encode(const Bits& message) const {
  if (!constructive_) throw std::logic_error("code: no constructive codec (analysis-only)");
  if (int(message.size()) != k_) throw std::invalid_argument("code: message length != k");
  return impl_->encode(message);
}

DecodeOutcome Code::decode(const Bits& received) const {
  if (!constructive_) throw std::logic_error("code: no constructive codec (analysis-only)");
  if (int(received.size()) != n_)
    throw std::invalid_argument("code: received length != n");
  return impl_->decode(received);
}

}  // namespace pufkey
