#pragma once

#include <map>
#include <string>
#include <vector>

#include "qarg/types.hpp"

namespace qarg {

// Letters of a Pauli basis string. No Y: the Heisenberg-Weyl group is
// generated by X-type and Z-type words with +-1 signs only.
enum class Letter : uint8_t { I = 0, X = 1, Z = 2 };

// A basis string w in {I, X, Z}^n. ASCII form uses the letters "IXZ".
struct PauliString {
  std::vector<Letter> letters;

  int size() const { return int(letters.size()); }
  Letter operator[](int i) const { return letters[size_t(i)]; }

  static PauliString parse(const std::string& s);
  static PauliString uniform(Letter l, int n);
  std::string str() const;

  bool operator==(const PauliString&) const = default;
};

// Signed symplectic element of W_n in normal form:
//   phase * sigma_X(xmask) * sigma_Z(zmask),  phase in {+1, -1}.
// Masks use bit i for qubit i (qubit 0 = leftmost tensor factor).
struct PauliWord {
  int n = 0;
  int8_t phase = +1;  // +1 or -1
  uint64_t xmask = 0;
  uint64_t zmask = 0;

  static PauliWord identity(int n) { return {n, +1, 0, 0}; }
  bool is_hermitian_word() const { return parity64(xmask & zmask) == 0; }

  bool operator==(const PauliWord&) const = default;
};

// sigma_w(a) = tensor_i sigma_{w_i}^{a_i}, phase +1.
PauliWord sigma_w(const PauliString& w, uint64_t a);

// Normal-form product: phase picks up (-1)^(p.zmask . q.xmask).
PauliWord word_mul(const PauliWord& p, const PauliWord& q);

// The 2x2 generators.
MatrixC pauli_matrix(Letter l);

// Dense realization of a word (2^n x 2^n). Qubit 0 is the most significant
// amplitude-index bit.
MatrixC word_to_dense(const PauliWord& p);

// pi^w_u = tensor_i (1 + (-1)^{u_i} sigma_{w_i}) / 2.
MatrixC pauli_projector(const PauliString& w, uint64_t u);

// Full projective family {pi^w_u}_u keyed by outcome mask.
std::vector<MatrixC> pauli_projector_family(const PauliString& w);

// Reduced measurement: (Q|_S)_v = sum_{u : u|_S = v} Q_u.
// Keys are outcome masks of length n (input) and |S| (output); S lists the
// retained index positions (bit k of an output key is input position S[k]).
std::map<uint64_t, MatrixC> reduce_measurement(
    const std::map<uint64_t, MatrixC>& family, int n,
    const std::vector<int>& S);

// JSON forms: word as {"sign": +-1, "xmask": hex, "zmask": hex, "n": n}.
std::string word_to_json(const PauliWord& p);
PauliWord word_from_json(const std::string& json);

}  // namespace qarg
