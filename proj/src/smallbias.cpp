#include "qarg/smallbias.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

namespace qarg {

namespace {

// Irreducible polynomials over GF(2), degree 1..16 (low bits listed with
// the leading x^m term included).
constexpr uint32_t kIrreducible[17] = {
    0,      0x3,    0x7,    0xB,    0x13,   0x25,   0x43,    0x89,  0x11D,
    0x211,  0x409,  0x805,  0x1053, 0x201B, 0x4443, 0x8003,  0x1100B};

}  // namespace

Gf2m::Gf2m(int m_) : m(m_) {
  require(m >= 1 && m <= 16, "Gf2m: degree out of range");
  poly = kIrreducible[m];
}

uint32_t Gf2m::mul(uint32_t a, uint32_t b) const {
  uint32_t r = 0;
  while (b) {
    if (b & 1) r ^= a;
    b >>= 1;
    a <<= 1;
    if (a & (uint32_t{1} << m)) a ^= poly;
  }
  return r;
}

uint32_t Gf2m::pow(uint32_t a, uint64_t e) const {
  uint32_t r = 1;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

BiasedSet construct_biased(int n, double target_bias) {
  require(n >= 1 && n <= 64, "construct_biased: n out of range");
  require(target_bias > 0 && target_bias < 1 + 1e-12,
          "construct_biased: target out of range");
  double need = double(n) / target_bias;
  int m = std::max(1, int(std::ceil(std::log2(need))));
  BiasedSet s;
  s.n = n;
  s.target_bias = target_bias;
  if (n <= 20 && 2 * m >= n) {
    // Exhaustive mode: the whole cube has bias 0 and is no larger.
    s.members.reserve(size_t{1} << n);
    for (uint64_t a = 0; a < (uint64_t{1} << n); ++a) s.members.push_back(a);
    return s;
  }
  require(m <= 16, "construct_biased: field too large");
  Gf2m f(m);
  uint64_t q = uint64_t{1} << m;
  s.members.reserve(size_t(q * q));
  std::unordered_set<uint64_t> seen;
  // Lexicographic by (x, y) so protocol-side indices are reproducible.
  // Colliding (x, y) pairs keep only their first occurrence.
  for (uint64_t x = 0; x < q; ++x) {
    // xp runs through x^0, x^1, ..., x^{n-1}
    std::vector<uint32_t> xp(size_t(n), 0);
    xp[0] = 1;
    for (int i = 1; i < n; ++i) xp[size_t(i)] = f.mul(xp[size_t(i - 1)], uint32_t(x));
    for (uint64_t y = 0; y < q; ++y) {
      uint64_t member = 0;
      for (int i = 0; i < n; ++i)
        if (parity64(xp[size_t(i)] & y)) member |= uint64_t{1} << i;
      if (seen.insert(member).second) s.members.push_back(member);
    }
  }
  return s;
}

double bias_of(const BiasedSet& s) {
  require(s.n >= 1 && s.n <= 24, "bias_of: n too large for brute force");
  require(!s.members.empty(), "bias_of: empty set");
  uint64_t count = uint64_t{1} << s.n;
  double worst = 0;
  for (uint64_t b = 1; b < count; ++b) {
    int64_t sum = 0;
    for (uint64_t a : s.members) sum += parity64(a & b) ? -1 : 1;
    double v = std::abs(double(sum)) / double(s.members.size());
    if (v > worst) worst = v;
  }
  return worst;
}

std::string BiasedSet::export_lines() const {
  std::ostringstream os;
  for (uint64_t a : members) {
    for (int i = 0; i < n; ++i) os << (((a >> i) & 1) ? '1' : '0');
    os << '\n';
  }
  return os.str();
}

BiasedSet BiasedSet::import_lines(const std::string& text) {
  BiasedSet s;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (s.n == 0) s.n = int(line.size());
    require(int(line.size()) == s.n, "import_lines: ragged rows");
    uint64_t a = 0;
    for (int i = 0; i < s.n; ++i) {
      require(line[size_t(i)] == '0' || line[size_t(i)] == '1',
              "import_lines: bad digit");
      if (line[size_t(i)] == '1') a |= uint64_t{1} << i;
    }
    s.members.push_back(a);
  }
  require(!s.members.empty(), "import_lines: empty");
  return s;
}

}  // namespace qarg
