#pragma once

#include <string>
#include <vector>

#include "qarg/types.hpp"

namespace qarg {

// The paper-side lambda collides with the security parameter; throughout
// this project the set parameter is `bias` and the crypto one `secparam`.
struct BiasedSet {
  int n = 0;
  std::vector<uint64_t> members;  // bit i of a member = position i
  double target_bias = 1.0;

  int size() const { return int(members.size()); }
  uint64_t member(size_t index) const { return members[index]; }

  std::string export_lines() const;  // newline-delimited binary strings
  static BiasedSet import_lines(const std::string& text);
};

// GF(2^m), polynomial basis modulo a fixed irreducible polynomial.
struct Gf2m {
  int m;
  uint32_t poly;  // reduction polynomial including the x^m term

  explicit Gf2m(int m);
  uint32_t mul(uint32_t a, uint32_t b) const;
  uint32_t pow(uint32_t a, uint64_t e) const;
};

// Powering construction: members indexed by (x, y) in GF(2^m)^2 with
// bit i = <bits(x^i), bits(y)>. Bias is at most (n-1)/2^m, so
// m = ceil(log2(n / target)) suffices; if the construction would be at
// least as large as the whole cube, the full cube (bias 0) is returned.
BiasedSet construct_biased(int n, double target_bias);

// max over nonzero b of |E_{a in S} (-1)^{a.b}|, by brute force.
double bias_of(const BiasedSet& s);

}  // namespace qarg
