#pragma once

#include "qarg/compiler.hpp"
#include "qarg/merkle.hpp"
#include "qarg/reed_solomon.hpp"

namespace qarg {

// NP-style relation with a declared time bound.
struct Relation {
  Bytes instance;
  std::function<bool(const Bytes& instance, const Bytes& witness)> decide;
  int64_t time_bound = 0;
};

struct SaokOpening {
  uint64_t index = 0;
  Bytes leaf;
  MerklePath path;
};

struct SaokTranscript {
  Bytes rt_m, rt_w;
  std::vector<uint64_t> challenges;
  std::vector<SaokOpening> openings;
  bool verdict = false;
  uint64_t verifier_bytes = 0;  // verifier -> prover
  uint64_t prover_bytes = 0;    // prover -> verifier
  size_t m_leaves = 0;          // padded tree width
  size_t m_bytes_len = 0;       // exact committed message length
};

// Commit-and-open prover: m = (encoded witness, proof), plus the extra
// commitment to the witness itself. Deterministic once built, so it can be
// rewound. Adversarial provers substitute arbitrary committed bytes.
class SaokProver {
 public:
  SaokProver(const Bytes& witness, const HashSpec& hash);
  // commit to arbitrary m bytes (and w bytes) instead of the honest pair
  SaokProver(const Bytes& m_bytes, const Bytes& w_bytes,
             const HashSpec& hash);

  const Bytes& rt_m() const { return tree_m_.root(); }
  const Bytes& rt_w() const { return tree_w_.root(); }
  size_t m_leaf_count() const { return tree_m_.leaf_count(); }
  const Bytes& m_bytes() const { return m_; }

  std::vector<SaokOpening> respond(const std::vector<uint64_t>& j) const;

 private:
  Bytes m_, w_;
  MerkleCommitment tree_m_, tree_w_;
};

// honest m layout: [u32 |wt|][wt = rs::encode(w)][u32 |pi|][pi = w]
Bytes saok_message_bytes(const Bytes& witness);
// byte range of the encoded-witness region inside m
std::pair<size_t, size_t> saok_encoded_region(const Bytes& m);

// Run the three messages. `reference_m`, when given, is the spot-check
// oracle: opened leaves must match it, and the relation is evaluated on the
// witness decoded from it (the declared naive stand-in for a PCPP; the
// Merkle layer alone carries the communication succinctness).
SaokTranscript saok_run(const SaokProver& prover, const Relation& rel,
                        const HashSpec& hash, int k, Rng& rng,
                        const Bytes* reference_m);

// verifier side alone, for transcripts produced elsewhere
bool saok_verify(const SaokTranscript& t, const Relation& rel,
                 const HashSpec& hash, const Bytes* reference_m);

// ------------------------------------------------------------ full protocol

struct SuccinctProver {
  // phase 1: answer the encrypted Alice question
  std::function<Ciphertext(const Ciphertext& c, Rng& rng)> answer1;
  // phase 2: answer the plaintext Bob question
  std::function<Answer(const Question& y, Rng& rng)> answer2;
  // phase 3 witness override (cheating provers); empty = honest
  std::function<Bytes(const Bytes& honest_w3)> tamper3;
};

SuccinctProver succinct_prover_from_compiled(const CompiledProver& prover);
// wire-shape-only prover for byte accounting at scales beyond simulation
SuccinctProver zero_answer_prover(int n, const std::string& scheme_name);

struct SuccinctPhase {
  std::string name;
  bool ok = false;
  SaokTranscript saok;
};

struct SuccinctTranscript {
  bool verdict = false;
  std::string reject_phase;
  bool compiled_verdict = false;  // the wrapped V(x,y,a,b) inside R3
  std::vector<SuccinctPhase> phases;
  uint64_t verifier_to_prover_bytes = 0;
  uint64_t prover_to_verifier_bytes = 0;
  // the same content with no commitments and no compression
  uint64_t naive_baseline_bytes = 0;
  std::string to_json() const;
};

struct SuccinctConfig {
  int secparam = 128;
  int k = 32;
  HashSpec hash;
  // full sampling-randomness budget of the underlying distribution, used
  // only by the naive baseline accounting
  int64_t naive_seed_bits = 0;
};

// The phase-3 relation: openings bind to the earlier commitments and the
// decrypted answers satisfy the compiled verifier predicate. When
// `verdict_out` is non-null, the wrapped predicate's value is written
// through it on every successful parse.
Relation phase3_relation(const BiasedSet& S, const MeasurementHamiltonian& mh,
                         const QuestionPair& qp, const SecretKey& sk,
                         const QheScheme& qhe, const Bytes& root1,
                         const Bytes& root2, const HashSpec& hash,
                         bool* verdict_out = nullptr);

SuccinctTranscript run_succinct_protocol(const BiasedSet& S,
                                         const MeasurementHamiltonian& mh,
                                         const QheScheme& qhe,
                                         const SuccinctProver& prover,
                                         const SuccinctConfig& cfg, Rng& rng,
                                         const QuestionPair* forced = nullptr);

// --------------------------------------------------------------- extractor

struct ExtractionResult {
  enum Status { Success, Failure, BindingViolation } status = Failure;
  Bytes witness;
  int rewinds = 0;
  std::string note;
};

// Oracle view of a resettable deterministic prover.
struct ProverOracle {
  Bytes rt_m, rt_w;
  size_t m_leaf_count = 0;
  std::function<std::vector<SaokOpening>(const std::vector<uint64_t>&)>
      respond;
};

ProverOracle oracle_of(const SaokProver& prover);

// Rewind with fresh challenges until the encoded-witness region decodes;
// verifies R(instance, w) on the result.
ExtractionResult classical_extract(const ProverOracle& prover,
                                   const Relation& rel, const HashSpec& hash,
                                   int k, int max_rewinds, Rng& rng);

}  // namespace qarg
