#pragma once

#include <memory>
#include <optional>
#include <variant>

#include "qarg/hamiltonian.hpp"
#include "qarg/pauli.hpp"
#include "qarg/simulator.hpp"
#include "qarg/smallbias.hpp"

namespace qarg {

enum class Basis : uint8_t { X, Z };
inline Letter basis_letter(Basis b) {
  return b == Basis::X ? Letter::X : Letter::Z;
}

// Question shapes. Bob sees the same PureBasis object in the commutation
// test and in the consistency branch of the mixed-versus-pure test, so the
// two are indistinguishable from his side by construction.
struct ComQ {
  uint32_t ra = 0, rb = 0;
};
struct MsAliceQ {
  uint32_t ra = 0, rb = 0;
  int i1 = 0, i2 = 0, i3 = 0;  // cells 1..9, a row or column
};
struct MsBobQ {
  uint32_t ra = 0, rb = 0;
  int j = 0;
};
struct PureBasisQ {
  Basis w = Basis::Z;
};
struct MixedQ {
  BitVec seed;
};
struct TeleQ {};

using Question =
    std::variant<ComQ, MsAliceQ, MsBobQ, PureBasisQ, MixedQ, TeleQ>;

std::string question_key(const Question& q);

struct Answer {
  BitVec bits;
};

// Shared-state strategy; each responder acts only through simulator
// measurements on the state it is handed.
struct TwoProverStrategy {
  QuantumState initial;
  std::function<std::pair<Answer, QuantumState>(const Question&,
                                                const QuantumState&, Rng&)>
      alice;
  std::function<std::pair<Answer, QuantumState>(const Question&,
                                                const QuantumState&, Rng&)>
      bob;
};

struct QuestionPair {
  Question alice;
  Question bob;
  std::string test_id;  // commutation | anticommutation | mixed | hamiltonian
};

struct GameTranscript {
  std::string test_id;
  Question alice_q;
  Answer alice_a;
  Question bob_q;
  Answer bob_a;
  bool verdict = false;
  uint64_t rng_seed = 0;
  uint64_t rng_draws = 0;
  std::string to_json() const;
};

// ----------------------------------------------------------- magic square

// Signed (n+1)-qubit observable for cell 1..9; the first letter acts on the
// grid qubit, the masked tail on the last n qubits.
PauliWord magic_square_word(int cell, uint64_t a, uint64_t b, int n);
// (i1,i2,i3) for row/column lines; lines 0..2 rows, 3..5 columns.
std::array<int, 3> ms_line_cells(int line);
// outcome-parity each line must satisfy: 0 for rows, 1 for columns
int ms_line_parity(int line);
bool ms_is_line(int i1, int i2, int i3);

// Exhaustive classical oracle for the row/column magic square game:
// maximum wins over all deterministic assignments, out of 9 question pairs.
struct MagicSquareOracle {
  int best_wins = 0;
  int pairs = 9;
  double value() const { return double(best_wins) / double(pairs); }
};
MagicSquareOracle magic_square_classical_oracle();

// ------------------------------------------------------------- predicates

bool verify_commutation(const BiasedSet& S, uint32_t ra, uint32_t rb, int ua,
                        int ub, Basis bobW, uint64_t v);
bool verify_anticommutation(const BiasedSet& S, const MsAliceQ& aq,
                            const BitVec& aliceBits, const Question& bq,
                            const BitVec& bobBits);
bool verdict_of(const BiasedSet& S, const MeasurementHamiltonian& mh,
                const QuestionPair& qp, const Answer& alice,
                const Answer& bob);

// --------------------------------------------------------------- sampling

QuestionPair sample_braiding_questions(const BiasedSet& S, Rng& rng,
                                       bool strict);
QuestionPair sample_mixed_questions(const MeasurementHamiltonian& mh,
                                    Rng& rng);
QuestionPair sample_hamiltonian_questions(const MeasurementHamiltonian& mh,
                                          Rng& rng);
QuestionPair sample_main_questions(const BiasedSet& S,
                                   const MeasurementHamiltonian& mh, Rng& rng,
                                   bool strict);

// ------------------------------------------------------------ honest play

// Branch-level honest prover; exact evaluators and the compiled engine both
// route through this object. Register layout: witness on [0,n), Alice grid
// qubit at n, Alice masked qubits on [n+1, 2n], Bob grid qubit at 2n+1,
// Bob masked qubits on [2n+2, 3n+1].
class HonestContext {
 public:
  HonestContext(QuantumState witness, MeasurementHamiltonian mh, BiasedSet S);

  int n() const { return n_; }
  const BiasedSet& biased_set() const { return S_; }
  const MeasurementHamiltonian& mh() const { return mh_; }
  QuantumState initial_state() const;

  // Subnormalized (answer, post-state) branches for either prover.
  std::vector<std::pair<Answer, QuantumState>> alice_branches(
      const Question& q, const QuantumState& state) const;
  std::vector<std::pair<Answer, QuantumState>> bob_branches(
      const Question& q, const QuantumState& state) const;

  std::pair<Answer, QuantumState> respond_sampled(bool alice_side,
                                                  const Question& q,
                                                  const QuantumState& state,
                                                  Rng& rng) const;

 private:
  int n_;
  QuantumState witness_;
  MeasurementHamiltonian mh_;
  BiasedSet S_;
};

TwoProverStrategy honest_strategy(const QuantumState& witness,
                                  const MeasurementHamiltonian& mh,
                                  const BiasedSet& S);

// Deterministic table prover; answers must cover every question asked
// (an uncovered question is an error).
using AnswerTable = std::function<std::optional<BitVec>(const Question&)>;
TwoProverStrategy classical_strategy(AnswerTable alice, AnswerTable bob);
AnswerTable constant_zero_table(int n);

// ------------------------------------------------------------------- runs

GameTranscript run_questions(TwoProverStrategy& strategy, const BiasedSet& S,
                             const MeasurementHamiltonian& mh,
                             const QuestionPair& qp, Rng& rng);
GameTranscript run_pauli_braiding(TwoProverStrategy& strategy,
                                  const BiasedSet& S,
                                  const MeasurementHamiltonian& mh, Rng& rng,
                                  bool strict = false);
GameTranscript run_mixed_vs_pure(TwoProverStrategy& strategy,
                                 const BiasedSet& S,
                                 const MeasurementHamiltonian& mh, Rng& rng);
GameTranscript run_hamiltonian_test(TwoProverStrategy& strategy,
                                    const BiasedSet& S,
                                    const MeasurementHamiltonian& mh,
                                    Rng& rng);
GameTranscript run_main(TwoProverStrategy& strategy, const BiasedSet& S,
                        const MeasurementHamiltonian& mh, Rng& rng,
                        bool strict = false);

// --------------------------------------------------------- exact verdicts

// Exact honest acceptance probabilities, by full branch enumeration over
// questions and measurement outcomes.
double exact_commutation_accept(const HonestContext& ctx);
double exact_anticommutation_accept(const HonestContext& ctx);
double exact_braiding_accept(const HonestContext& ctx, bool strict = false);
double exact_mixed_accept(const HonestContext& ctx);
// requires an enumerable seed space or exact terms on ctx.mh()
double exact_hamiltonian_accept(const HonestContext& ctx);
double exact_main_accept(const HonestContext& ctx, bool strict = false);

// Exact joint answer distribution of the honest strategy on one question
// pair, keyed by (alice bits, bob bits) as hex strings.
std::map<std::pair<std::string, std::string>, double> exact_joint_answers(
    const HonestContext& ctx, const QuestionPair& qp);

// Exact acceptance of a deterministic table prover over the question
// distribution of one test (or the full main game mix).
double exact_accept_tables(const BiasedSet& S, const MeasurementHamiltonian& mh,
                           const AnswerTable& alice, const AnswerTable& bob,
                           const std::string& test_id, bool strict = false);

std::string answer_hex(const BitVec& bits);

}  // namespace qarg
