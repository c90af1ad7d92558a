#pragma once

#include <memory>

#include "qarg/games.hpp"

namespace qarg {

Bytes question_to_bytes(const Question& q);
Question question_from_bytes(const Bytes& data);

// Length-prefixed wire form with a scheme-identifier header.
struct Ciphertext {
  std::string scheme;
  Bytes nonce;
  Bytes payload;

  Bytes to_wire() const;
  static Ciphertext from_wire(const Bytes& data);
};

struct SecretKey {
  Bytes material;
  Bytes nonce;
  int secparam = 0;
};

// The question-dependent measurement the prover evaluates under the
// encryption; branch form drives the exact checks.
struct AliceCircuit {
  std::function<std::vector<std::pair<Answer, QuantumState>>(
      const Question&, const QuantumState&)>
      branches;
  std::function<std::pair<Answer, QuantumState>(const Question&,
                                                const QuantumState&, Rng&)>
      sample;
};

AliceCircuit honest_alice_circuit(std::shared_ptr<const HonestContext> ctx);

class QheScheme {
 public:
  virtual ~QheScheme() = default;
  virtual std::string name() const = 0;
  // test schemes must say so, so no soundness claim can lean on them
  virtual bool semantically_secure() const = 0;
  virtual SecretKey gen(int secparam, Rng& rng) const = 0;
  virtual Ciphertext enc(const SecretKey& sk, const Question& x) const = 0;
  virtual std::pair<Ciphertext, QuantumState> eval(const AliceCircuit& c,
                                                   const QuantumState& state,
                                                   const Ciphertext& ct,
                                                   Rng& rng) const = 0;
  // every (answer ciphertext, post state, probability) branch of eval
  virtual std::vector<std::tuple<Ciphertext, QuantumState, double>>
  eval_branches(const AliceCircuit& c, const QuantumState& state,
                const Ciphertext& ct) const = 0;
  // decrypt a classical answer ciphertext to answer bits
  virtual BitVec dec(const SecretKey& sk, const Ciphertext& ct) const = 0;
};

// Correctness-only scheme: enc tags the plaintext with a key nonce, eval
// runs the circuit on the plaintext inside the wrapper.
std::shared_ptr<const QheScheme> transparent_qhe();

// One-time-pad variant: question parameters are XOR-padded, so eval only
// supports circuits whose measurements do not depend on the hidden
// parameters (the teleportation question qualifies). The teleportation
// corrections double as the output's Pauli pad keys.
std::shared_ptr<const QheScheme> pauli_otp_qhe();

struct CompiledProver {
  QuantumState initial;
  std::function<std::pair<Ciphertext, QuantumState>(const Ciphertext&,
                                                    const QuantumState&, Rng&)>
      round1;
  std::function<Answer(const Question&, const QuantumState&, Rng&)> round2;
};

CompiledProver honest_compiled_prover(std::shared_ptr<const HonestContext> ctx,
                                      std::shared_ptr<const QheScheme> qhe);

struct CompiledTranscript {
  Ciphertext c;
  Ciphertext alpha;
  Question y;
  Answer b;
  BitVec decrypted_a;
  bool verdict = false;
  bool decryption_failed = false;
  std::string diagnostic;
  std::string test_id;
  std::string to_json() const;
};

// The five compiler steps: sample (x, y), keygen, encrypt x, prover round
// one, reveal y, prover round two, decrypt, verify.
CompiledTranscript compile_and_run(const BiasedSet& S,
                                   const MeasurementHamiltonian& mh,
                                   const QheScheme& qhe,
                                   const CompiledProver& prover, int secparam,
                                   Rng& rng,
                                   const QuestionPair* forced = nullptr);

// Exact joint (decrypted answer, bob answer) distribution through the
// compiled path, for comparison against the uncompiled engine.
std::map<std::pair<std::string, std::string>, double> exact_compiled_joint(
    const HonestContext& ctx, const QheScheme& qhe, int secparam,
    const QuestionPair& qp, Rng& rng);

}  // namespace qarg
