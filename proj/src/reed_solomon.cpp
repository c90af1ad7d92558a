#include "qarg/reed_solomon.hpp"

namespace qarg {
namespace rs {

namespace {

// GF(256) with the 0x11d reduction polynomial
struct Tables {
  uint8_t exp[512];
  uint8_t log[256];
  Tables() {
    int x = 1;
    for (int i = 0; i < 255; ++i) {
      exp[i] = uint8_t(x);
      log[x] = uint8_t(i);
      x <<= 1;
      if (x & 0x100) x ^= 0x11d;
    }
    for (int i = 255; i < 512; ++i) exp[i] = exp[i - 255];
    log[0] = 0;
  }
};
const Tables& tables() {
  static Tables t;
  return t;
}

inline uint8_t gmul(uint8_t a, uint8_t b) {
  if (a == 0 || b == 0) return 0;
  const Tables& t = tables();
  return t.exp[int(t.log[a]) + int(t.log[b])];
}

inline uint8_t gdiv(uint8_t a, uint8_t b) {
  require(b != 0, "rs: division by zero");
  if (a == 0) return 0;
  const Tables& t = tables();
  return t.exp[(int(t.log[a]) + 255 - int(t.log[b])) % 255];
}

inline uint8_t gpow(uint8_t a, int e) {
  const Tables& t = tables();
  if (a == 0) return 0;
  int v = (int(t.log[a]) * e) % 255;
  if (v < 0) v += 255;
  return t.exp[v];
}

using Poly = std::vector<uint8_t>;  // coefficients, lowest degree first

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      r[i + j] = uint8_t(r[i + j] ^ gmul(a[i], b[j]));
  return r;
}

uint8_t poly_eval(const Poly& p, uint8_t x) {
  uint8_t acc = 0;
  for (size_t i = p.size(); i-- > 0;) acc = uint8_t(gmul(acc, x) ^ p[i]);
  return acc;
}

// generator polynomial prod_{i=0}^{parity-1} (x - alpha^i)
const Poly& generator() {
  static Poly g = [] {
    Poly g{1};
    for (int i = 0; i < kParity; ++i)
      g = poly_mul(g, Poly{gpow(2, i), 1});
    return g;
  }();
  return g;
}

}  // namespace

std::array<uint8_t, kN> encode_block(const std::array<uint8_t, kK>& data) {
  // systematic: codeword = data || remainder(data * x^parity, g)
  const Poly& g = generator();
  std::array<uint8_t, kParity> rem{};
  for (int i = 0; i < kK; ++i) {
    uint8_t coef = uint8_t(data[size_t(i)] ^ rem[0]);
    for (int j = 0; j < kParity - 1; ++j)
      rem[size_t(j)] =
          uint8_t(rem[size_t(j + 1)] ^ gmul(coef, g[size_t(kParity - 1 - j)]));
    rem[kParity - 1] = gmul(coef, g[0]);
  }
  std::array<uint8_t, kN> out{};
  for (int i = 0; i < kK; ++i) out[size_t(i)] = data[size_t(i)];
  for (int i = 0; i < kParity; ++i) out[size_t(kK + i)] = rem[size_t(i)];
  return out;
}

std::optional<std::array<uint8_t, kK>> decode_block(
    const std::array<uint8_t, kN>& received,
    const std::vector<int>& erasures) {
  if (int(erasures.size()) > kParity) return std::nullopt;
  // codeword viewed as polynomial c(x) with c[i] the coefficient of x^i at
  // position i; we transmit data at high positions, so map position p to
  // exponent kN-1-p
  Poly c(kN, 0);
  for (int p = 0; p < kN; ++p) c[size_t(kN - 1 - p)] = received[size_t(p)];

  Poly synd(size_t(kParity), 0);
  bool all_zero = true;
  for (int i = 0; i < kParity; ++i) {
    synd[size_t(i)] = poly_eval(c, gpow(2, i));
    all_zero &= synd[size_t(i)] == 0;
  }
  std::array<uint8_t, kK> data{};
  if (all_zero) {
    for (int i = 0; i < kK; ++i) data[size_t(i)] = received[size_t(i)];
    return data;
  }

  // erasure locator Gamma(x) = prod (1 - x alpha^{e_i}) over erased exponents
  Poly gamma{1};
  for (int p : erasures) {
    require(p >= 0 && p < kN, "rs: erasure position");
    gamma = poly_mul(gamma, Poly{1, gpow(2, kN - 1 - p)});
  }
  // Forney syndromes: drop the lowest erasure-count coefficients of
  // gamma * S; what remains is the syndrome sequence of the errors alone
  Poly prod(size_t(kParity), 0);
  for (size_t i = 0; i < synd.size(); ++i)
    for (size_t j = 0; j < gamma.size(); ++j)
      if (i + j < size_t(kParity))
        prod[i + j] = uint8_t(prod[i + j] ^ gmul(synd[i], gamma[j]));
  Poly fsynd(size_t(kParity) - erasures.size(), 0);
  for (size_t i = 0; i < fsynd.size(); ++i)
    fsynd[i] = prod[i + erasures.size()];

  // Berlekamp-Massey on the Forney syndromes
  Poly err{1}, old{1};
  for (int i = 0; i < kParity - int(erasures.size()); ++i) {
    uint8_t delta = fsynd[size_t(i)];
    for (size_t j = 1; j < err.size(); ++j)
      delta = uint8_t(delta ^ gmul(err[j], fsynd[size_t(i) - j]));
    old.insert(old.begin(), 0);  // old *= x
    if (delta != 0) {
      if (old.size() > err.size()) {
        Poly neu(old.size(), 0);
        for (size_t j = 0; j < old.size(); ++j) neu[j] = gmul(old[j], delta);
        uint8_t inv = gdiv(1, delta);
        old = err;
        for (auto& v : old) v = gmul(v, inv);
        err = neu;
      }
      for (size_t j = 0; j < old.size(); ++j)
        err[j] = uint8_t(err[j] ^ gmul(old[j], delta));
    }
  }
  while (err.size() > 1 && err.back() == 0) err.pop_back();
  int errs = int(err.size()) - 1;
  if (2 * errs + int(erasures.size()) > kParity) return std::nullopt;

  // errata locator and evaluator
  Poly locator = poly_mul(err, gamma);
  while (locator.size() > 1 && locator.back() == 0) locator.pop_back();
  Poly omega(size_t(kParity), 0);
  for (size_t i = 0; i < synd.size(); ++i)
    for (size_t j = 0; j < locator.size(); ++j)
      if (i + j < size_t(kParity))
        omega[i + j] = uint8_t(omega[i + j] ^ gmul(synd[i], locator[j]));

  // formal derivative: only odd-degree terms survive in characteristic 2
  Poly deriv_full(locator.size() > 1 ? locator.size() - 1 : 1, 0);
  for (size_t i = 1; i < locator.size(); ++i)
    if (i % 2 == 1) deriv_full[i - 1] = locator[i];

  Poly fixed = c;
  int found = 0;
  for (int exponent = 0; exponent < kN; ++exponent) {
    uint8_t xinv = gpow(2, 255 - exponent);  // alpha^{-exponent}
    if (poly_eval(locator, xinv) != 0) continue;
    // Forney: magnitude = x^{1} * omega(xinv) / locator'(xinv), fcr = 0
    uint8_t num = poly_eval(omega, xinv);
    uint8_t den = poly_eval(deriv_full, xinv);
    if (den == 0) return std::nullopt;
    uint8_t mag = gdiv(num, den);
    mag = gmul(mag, gpow(2, exponent));
    fixed[size_t(exponent)] = uint8_t(fixed[size_t(exponent)] ^ mag);
    ++found;
  }
  if (found != int(locator.size()) - 1) return std::nullopt;
  // verify the syndromes vanish after correction
  for (int i = 0; i < kParity; ++i)
    if (poly_eval(fixed, gpow(2, i)) != 0) return std::nullopt;
  for (int i = 0; i < kK; ++i) data[size_t(i)] = fixed[size_t(kN - 1 - i)];
  return data;
}

size_t encoded_size(size_t data_size) {
  size_t framed = data_size + 4;
  size_t blocks = (framed + size_t(kK) - 1) / size_t(kK);
  return blocks * size_t(kN);
}

Bytes encode(const Bytes& data) {
  Bytes framed;
  framed.reserve(data.size() + 4);
  for (int i = 0; i < 4; ++i)
    framed.push_back(uint8_t(data.size() >> (8 * i)));
  framed.insert(framed.end(), data.begin(), data.end());
  while (framed.size() % size_t(kK) != 0) framed.push_back(0);
  Bytes out;
  out.reserve(framed.size() / size_t(kK) * size_t(kN));
  for (size_t off = 0; off < framed.size(); off += size_t(kK)) {
    std::array<uint8_t, kK> block{};
    std::copy(framed.begin() + long(off), framed.begin() + long(off + kK),
              block.begin());
    auto code = encode_block(block);
    out.insert(out.end(), code.begin(), code.end());
  }
  return out;
}

std::optional<Bytes> decode(const Bytes& code) {
  if (code.empty() || code.size() % size_t(kN) != 0) return std::nullopt;
  Bytes framed;
  framed.reserve(code.size() / size_t(kN) * size_t(kK));
  for (size_t off = 0; off < code.size(); off += size_t(kN)) {
    std::array<uint8_t, kN> block{};
    std::copy(code.begin() + long(off), code.begin() + long(off + kN),
              block.begin());
    auto data = decode_block(block, {});
    if (!data) return std::nullopt;
    framed.insert(framed.end(), data->begin(), data->end());
  }
  if (framed.size() < 4) return std::nullopt;
  size_t len = 0;
  for (int i = 0; i < 4; ++i) len |= size_t(framed[size_t(i)]) << (8 * i);
  if (len + 4 > framed.size()) return std::nullopt;
  return Bytes(framed.begin() + 4, framed.begin() + long(4 + len));
}

}  // namespace rs
}  // namespace qarg
