#include <doctest.h>

#include <set>

#include "qarg/smallbias.hpp"

using namespace qarg;

TEST_CASE("gf2m field sanity") {
  for (int m : {3, 6, 8, 12}) {
    Gf2m f(m);
    uint32_t q = uint32_t(1) << m;
    // x^(2^m) == x for a few elements (field closure under Frobenius)
    for (uint32_t a : {uint32_t(1), uint32_t(2), q - 1, q / 2 + 1}) {
      CHECK(f.pow(a % q, uint64_t(1) << m) == a % q);
    }
    // no zero divisors on a sample
    for (uint32_t a = 1; a < std::min<uint32_t>(q, 40); ++a)
      for (uint32_t b = 1; b < std::min<uint32_t>(q, 40); ++b)
        CHECK(f.mul(a, b) != 0);
  }
}

TEST_CASE("bias_of hand values") {
  BiasedSet zero{2, {0}, 1.0};
  CHECK(bias_of(zero) == doctest::Approx(1.0));

  BiasedSet cube{2, {0, 1, 2, 3}, 1.0};
  CHECK(bias_of(cube) == doctest::Approx(0.0));

  // {00, 11}: b = 11 gives (-1)^0 and (-1)^0 ... both +1
  BiasedSet pair{2, {0b00, 0b11}, 1.0};
  CHECK(bias_of(pair) == doctest::Approx(1.0));
}

TEST_CASE("exhaustive mode returns the full cube with bias 0") {
  auto s = construct_biased(4, 0.99);
  CHECK(s.size() == 16);
  CHECK(bias_of(s) == doctest::Approx(0.0));
}

TEST_CASE("construction meets its target across sizes") {
  struct Case { int n; double t; };
  for (auto c : {Case{10, 0.4}, Case{12, 0.3}, Case{16, 0.25}, Case{16, 0.2},
                 Case{20, 0.3}}) {
    auto s = construct_biased(c.n, c.t);
    CHECK(bias_of(s) <= c.t);
    // size stays within the squared bound, constant reported below 4
    double constant = double(s.size()) * c.t * c.t / (double(c.n) * c.n);
    CHECK(constant <= 4.0);
  }
}

TEST_CASE("members are unique and ordering is deterministic") {
  auto a = construct_biased(16, 0.25);
  auto b = construct_biased(16, 0.25);
  CHECK(a.members == b.members);
  std::set<uint64_t> uniq(a.members.begin(), a.members.end());
  CHECK(uniq.size() == a.members.size());
}

TEST_CASE("export / import round trip") {
  auto s = construct_biased(12, 0.4);
  auto text = s.export_lines();
  auto back = BiasedSet::import_lines(text);
  CHECK(back.n == s.n);
  CHECK(back.members == s.members);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(construct_biased(8, 0.0), Error);
  CHECK_THROWS_AS(construct_biased(8, -1.0), Error);
  BiasedSet big{25, {1}, 0.5};
  CHECK_THROWS_AS(bias_of(big), Error);
}
