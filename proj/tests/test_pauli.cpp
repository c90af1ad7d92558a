#include <doctest.h>

#include "qarg/pauli.hpp"
#include "qarg/rng.hpp"

using namespace qarg;

namespace {

PauliWord random_word(int n, Rng& rng) {
  PauliWord p;
  p.n = n;
  p.phase = rng.next_bit() ? -1 : +1;
  p.xmask = rng.next_u64() & ((uint64_t{1} << n) - 1);
  p.zmask = rng.next_u64() & ((uint64_t{1} << n) - 1);
  return p;
}

}  // namespace

TEST_CASE("sigma_w splits letters into masks") {
  auto w = PauliString::parse("XZ");
  PauliWord p = sigma_w(w, 0b11);
  CHECK(p.phase == 1);
  CHECK(p.xmask == 0b01);  // X at position 0
  CHECK(p.zmask == 0b10);  // Z at position 1

  PauliWord id = sigma_w(PauliString::parse("II"), 0b11);
  CHECK(id == PauliWord::identity(2));

  PauliWord z = sigma_w(PauliString::parse("ZZZ"), 0b101);
  CHECK(z.xmask == 0);
  CHECK(z.zmask == 0b101);
}

TEST_CASE("word_mul sign rule") {
  // ZX = -XZ on one qubit
  PauliWord z{1, +1, 0, 1}, x{1, +1, 1, 0};
  PauliWord zx = word_mul(z, x);
  CHECK(zx.phase == -1);
  CHECK(zx.xmask == 1);
  CHECK(zx.zmask == 1);

  // disjoint supports commute
  PauliWord xi{2, +1, 0b01, 0}, iz{2, +1, 0, 0b10};
  CHECK(word_mul(xi, iz) == PauliWord{2, +1, 0b01, 0b10});

  // (sigma_X sigma_Z)^2 = -1
  PauliWord xz{1, +1, 1, 1};
  CHECK(word_mul(xz, xz) == PauliWord{1, -1, 0, 0});
}

TEST_CASE("word_mul is associative with identity, exhaustively on W_1") {
  std::vector<PauliWord> w1;
  for (int s = 0; s < 2; ++s)
    for (uint64_t x = 0; x < 2; ++x)
      for (uint64_t z = 0; z < 2; ++z)
        w1.push_back({1, int8_t(s ? -1 : 1), x, z});
  CHECK(w1.size() == 8);
  for (const auto& a : w1) {
    CHECK(word_mul(a, PauliWord::identity(1)) == a);
    CHECK(word_mul(PauliWord::identity(1), a) == a);
    for (const auto& b : w1)
      for (const auto& c : w1)
        CHECK(word_mul(word_mul(a, b), c) == word_mul(a, word_mul(b, c)));
  }
}

TEST_CASE("word_mul associativity, randomized at n = 6") {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    auto a = random_word(6, rng), b = random_word(6, rng),
         c = random_word(6, rng);
    CHECK(word_mul(word_mul(a, b), c) == word_mul(a, word_mul(b, c)));
  }
}

TEST_CASE("same-string sigma_w products are exactly linear") {
  Rng rng(3);
  const char* strings[] = {"XXXX", "ZZZZ", "XZXZ", "IXZI"};
  for (const char* ws : strings) {
    auto w = PauliString::parse(ws);
    for (int i = 0; i < 200; ++i) {
      uint64_t a = rng.next_u64() & 15, b = rng.next_u64() & 15;
      CHECK(word_mul(sigma_w(w, a), sigma_w(w, b)) == sigma_w(w, a ^ b));
    }
  }
}

TEST_CASE("word_to_dense basics") {
  CHECK((word_to_dense(PauliWord::identity(1)) - MatrixC::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((word_to_dense(PauliWord{1, +1, 1, 0}) - pauli_matrix(Letter::X))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((word_to_dense(PauliWord{1, +1, 0, 1}) - pauli_matrix(Letter::Z))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("word_to_dense is a homomorphism on 100 random pairs at n=3") {
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    auto a = random_word(3, rng), b = random_word(3, rng);
    MatrixC lhs = word_to_dense(word_mul(a, b));
    MatrixC rhs = word_to_dense(a) * word_to_dense(b);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("every word squares to (-1)^(x.z) identity") {
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    auto a = random_word(5, rng);
    auto sq = word_mul(a, a);
    int8_t want = parity64(a.xmask & a.zmask) ? -1 : 1;
    CHECK(sq == PauliWord{5, want, 0, 0});
  }
}

TEST_CASE("pauli projectors") {
  auto pz0 = pauli_projector(PauliString::parse("Z"), 0);
  MatrixC want(2, 2);
  want << 1, 0, 0, 0;
  CHECK((pz0 - want).cwiseAbs().maxCoeff() < 1e-15);

  // minus eigenvector of X
  auto px1 = pauli_projector(PauliString::parse("X"), 1);
  VectorC minus(2);
  minus << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  CHECK((px1 * minus - minus).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(px1.trace().real() == doctest::Approx(1.0));
}

TEST_CASE("projector family: orthogonal, idempotent, complete") {
  auto w = PauliString::parse("XZ");
  auto fam = pauli_projector_family(w);
  MatrixC sum = MatrixC::Zero(4, 4);
  for (size_t i = 0; i < fam.size(); ++i) {
    sum += fam[i];
    CHECK((fam[i] * fam[i] - fam[i]).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(is_hermitian(fam[i]));
    for (size_t j = i + 1; j < fam.size(); ++j)
      CHECK((fam[i] * fam[j]).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK((sum - MatrixC::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("projector equals the character average of words, n <= 4") {
  Rng rng(31);
  for (int n = 1; n <= 4; ++n) {
    for (int rep = 0; rep < 4; ++rep) {
      PauliString w;
      for (int i = 0; i < n; ++i) {
        int r = int(rng.next_below(3));
        w.letters.push_back(r == 0 ? Letter::I
                                   : (r == 1 ? Letter::X : Letter::Z));
      }
      uint64_t u = rng.next_u64() & ((uint64_t{1} << n) - 1);
      Eigen::Index dim = Eigen::Index{1} << n;
      MatrixC avg = MatrixC::Zero(dim, dim);
      for (uint64_t a = 0; a < (uint64_t{1} << n); ++a) {
        double sgn = parity64(u & a) ? -1.0 : 1.0;
        avg += sgn * word_to_dense(sigma_w(w, a));
      }
      avg /= double(uint64_t{1} << n);
      CHECK((avg - pauli_projector(w, u)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("reduced measurements") {
  // full-Z two-qubit family reduced to first position
  auto fam = pauli_projector_family(PauliString::parse("ZZ"));
  std::map<uint64_t, MatrixC> m;
  for (uint64_t u = 0; u < 4; ++u) m[u] = fam[u];
  auto red = reduce_measurement(m, 2, {0});
  CHECK(red.size() == 2);
  MatrixC z0 = pauli_projector(PauliString::parse("ZI"), 0);
  CHECK((red[0] - z0).cwiseAbs().maxCoeff() < 1e-12);

  // S = [n] is the identity on the family
  auto full = reduce_measurement(m, 2, {0, 1});
  for (uint64_t u = 0; u < 4; ++u)
    CHECK((full[u] - m[u]).cwiseAbs().maxCoeff() == 0.0);

  // mixed-basis family for XZ reduced onto the Z position matches the
  // single-letter projector's marginal, by brute-force matrix sum
  auto xz = pauli_projector_family(PauliString::parse("XZ"));
  std::map<uint64_t, MatrixC> mm;
  for (uint64_t u = 0; u < 4; ++u) mm[u] = xz[u];
  auto redz = reduce_measurement(mm, 2, {1});
  for (uint64_t v = 0; v < 2; ++v) {
    MatrixC want = pauli_projector(PauliString::parse("IZ"), v << 1);
    CHECK((redz[v] - want).cwiseAbs().maxCoeff() < 1e-12);
  }

  CHECK_THROWS_AS(reduce_measurement(m, 2, {}), Error);
}

TEST_CASE("word json round trip") {
  PauliWord p{4, -1, 0b1010, 0b0110};
  CHECK(word_from_json(word_to_json(p)) == p);
}

TEST_CASE("dense cap is enforced") {
  CHECK_THROWS_AS(pauli_projector(PauliString::uniform(Letter::Z, 13), 0),
                  Error);
}
