#pragma once

#include <functional>
#include <variant>

#include "qarg/pauli.hpp"
#include "qarg/rng.hpp"
#include "qarg/types.hpp"

namespace qarg {

// Pure state on `qubits` qubits. Squared norm lies in (0, 1]; measurement
// branches are kept subnormalized until explicitly renormalized.
struct QuantumState {
  int qubits = 0;
  VectorC amp;

  static QuantumState zero(int qubits);
  static QuantumState from_amplitudes(int qubits, VectorC a);

  double norm2() const { return amp.squaredNorm(); }
  QuantumState renormalized() const;
};

struct MeasurementOutcome {
  uint64_t bits = 0;       // bit i = outcome at the i-th listed qubit
  QuantumState branch;     // renormalized post state
  double probability = 0;  // squared norm of the branch before renorm
  uint64_t draw_index = 0; // rng draw count at sampling time, for replay
};

// k EPR pairs; Alice's k qubits first, Bob's k qubits after (pair i <-> k+i).
QuantumState prepare_epr(int k);

QuantumState tensor(const QuantumState& a, const QuantumState& b);

// In-place single-qubit gate. Qubit 0 is the most significant index bit.
void apply_single_qubit(QuantumState& s, int q, const MatrixC& gate);
void apply_hadamard(QuantumState& s, int q);
void apply_cnot(QuantumState& s, int control, int target);

// Apply a signed word, its letter i acting on state qubit `qubits[i]`.
void apply_word(QuantumState& s, const PauliWord& p,
                const std::vector<int>& qubits);

// Binary-observable measurement of a Hermitian signed word: branches for
// outcome u in {0,1} are (1 + (-1)^u O) |psi> / 2, subnormalized.
std::array<QuantumState, 2> measure_word_branches(
    const QuantumState& s, const PauliWord& p, const std::vector<int>& qubits);

// Pauli-basis measurement of the listed qubits with letters w. Identity
// letters are not measured and force outcome bit 0.
std::vector<std::pair<uint64_t, QuantumState>> measure_bases_branches(
    const QuantumState& s, const std::vector<int>& qubits,
    const PauliString& w);

MeasurementOutcome measure_bases(const QuantumState& s,
                                 const std::vector<int>& qubits,
                                 const PauliString& w, Rng& rng);

// Project qubit q onto |bit> and drop it from the register. Subnormalized.
QuantumState collapse(const QuantumState& s, int q, int bit);

// Bell measurement of (q1, q2): branches keyed by (uz, ux) with both qubits
// dropped. For a source teleported through an EPR half, the remaining half
// holds sigma_X^ux sigma_Z^uz applied to the source state.
struct BellBranch {
  int ux = 0, uz = 0;
  QuantumState post;  // subnormalized
};
std::vector<BellBranch> bell_measure_branches(const QuantumState& s, int q1,
                                              int q2);

struct TeleportResult {
  int ux = 0, uz = 0;
  QuantumState post;  // renormalized, source and EPR-half qubits dropped
  double probability = 0;
};
// Teleport `source` through the EPR pair (alice_half, bob_half); bob_half
// keeps its index relative to the shrunk register.
TeleportResult teleport(const QuantumState& s, int source, int alice_half,
                        Rng& rng);

// Reduced state on `keep` (ascending); requires the complement to factor out
// (purity checked to 1e-9). Renormalized.
QuantumState extract_pure_subsystem(const QuantumState& s,
                                    const std::vector<int>& keep);

// Scripted exact acceptance: enumerate every measurement branch, sum the
// probability of branches the verdict accepts.
struct MeasureStep {
  std::vector<int> qubits;
  PauliString bases;
};
struct WordStep {
  PauliWord word;
  std::vector<int> qubits;
};
using ScriptStep = std::variant<MeasureStep, WordStep>;
using ScriptVerdict = std::function<bool(const std::vector<uint64_t>&)>;

double exact_accept_prob(const QuantumState& initial,
                         const std::vector<ScriptStep>& script,
                         const ScriptVerdict& verdict);

// Monte-Carlo counterpart of exact_accept_prob.
double sampled_accept_prob(const QuantumState& initial,
                           const std::vector<ScriptStep>& script,
                           const ScriptVerdict& verdict, int trials, Rng& rng);

// Optional state dump as a JSON list of (index, re, im).
std::string state_to_json(const QuantumState& s);

}  // namespace qarg
