#pragma once

#include <functional>

#include "qarg/pauli.hpp"
#include "qarg/rng.hpp"
#include "qarg/sha256.hpp"
#include "qarg/simulator.hpp"
#include "qarg/types.hpp"

namespace qarg {

// Bit string of arbitrary length, little-endian within bytes.
struct BitVec {
  Bytes bytes;
  int bits = 0;

  static BitVec zeros(int bits);
  static BitVec from_u64(uint64_t v, int bits);
  static BitVec random(int bits, Rng& rng);

  int get(int i) const;
  void set(int i, int v);
  uint64_t to_u64() const;  // bits <= 64
  BitVec slice(int from, int len) const;
  void append(const BitVec& other);

  bool operator==(const BitVec&) const = default;
};

// 2-local term: real coefficient times a product of X/Z letters on at most
// two qubits.
struct XZTerm {
  double coeff = 0;
  std::vector<int> qubits;   // 1 or 2 distinct indices
  std::vector<Letter> bases; // same length, letters in {X, Z}
};

struct XZHamiltonian {
  int n = 0;
  std::vector<XZTerm> terms;

  std::string to_json() const;
  static XZHamiltonian from_json(const std::string& json);
  MatrixC dense() const;  // n <= dense cap
};

// H = 1 - E_{w ~ D} sum_{u in Q(w)} pi^w_u, presented as a seeded sampler
// plus an acceptance predicate. `exact_terms`, when nonempty, carries the
// same distribution with exact weights for enumeration-free evaluation.
struct ExactTerm {
  double weight = 0;
  PauliString w;
  std::function<bool(const BitVec& outcome)> accept;
};

struct MeasurementHamiltonian {
  int n = 0;
  int seed_bits = 0;
  std::function<PauliString(const BitVec& seed)> sample_w;
  std::function<bool(const BitVec& seed, const BitVec& outcome)> accept;
  double alpha = 0;  // yes-side energy bound
  double beta = 1;   // no-side energy bound
  std::vector<ExactTerm> exact_terms;
  std::string recipe;  // JSON pipeline description, see mh_recipe_json
};

// Measurement form of an X/Z Hamiltonian: sample term j with probability
// |c_j| / sum|c|, measure it, accept iff the outcome sits on the
// low-energy side. Acceptance probability equals 1 - <H''> for the affine
// H'' = 1/2 + h / (2 sum|c|); term weights are quantized to `term_bits`
// dyadics and the quantized weights are what the output represents (the
// recipe records them). Extra `coin_bits` of seed are reserved for
// acceptance-bias coins; the X/Z terms here have +-1 outcomes, so the
// predicate never consumes them.
MeasurementHamiltonian mf_convert(const XZHamiltonian& h, double alpha_in,
                                  double beta_in, int term_bits = 24,
                                  int coin_bits = 16);

// Dense matrix of the rescaled Hamiltonian the sampler represents.
MatrixC dense_hamiltonian(const MeasurementHamiltonian& mh);
// Monte-Carlo estimate of the same matrix over `trials` random seeds.
MatrixC dense_hamiltonian_sampled(const MeasurementHamiltonian& mh,
                                  int trials, Rng& rng);
double ground_energy(const MatrixC& h);
VectorC ground_state(const MatrixC& h);

// Parallel repetition with threshold acceptance. The default threshold
// accepts iff the fraction of rejecting blocks is below (alpha+beta)/2;
// `literal_threshold` switches to the signed-sum form sum b_i < t(a+b)/2
// with b_i in {-1,+1}.
MeasurementHamiltonian ksv_amplify(const MeasurementHamiltonian& mh, int t,
                                   bool literal_threshold = false);

// Exact amplified acceptance for a strategy whose blocks accept i.i.d.
// with probability p, from binomial tails.
double ksv_amplified_accept(double p_block, int t, double alpha, double beta,
                            bool literal_threshold = false);

struct Prg {
  int seed_len = 0;  // bits
  int out_len = 0;   // bits
  std::function<BitVec(const BitVec& seed)> expand;
};

// GGM-style tree expansion over the keyed hash: 256-bit leaves, each
// internal node split by a domain-separated digest.
BitVec prg_expand(const HashSpec& hash, const BitVec& seed, int out_len);
Prg hash_prg(const HashSpec& hash, int seed_len, int out_len);
Prg identity_prg(int len);
Prg constant_prg(int seed_len, const BitVec& value);

// Replace the sampler's seed with a short PRG seed; acceptance unchanged.
MeasurementHamiltonian prg_subsample(const MeasurementHamiltonian& mh,
                                     const Prg& prg);

// D': sample w ~ D and a uniform, keep w_i where a_i = 1, identity else.
// The seed carries the w-seed followed by n bits of a.
PauliString dprime_sample(const MeasurementHamiltonian& mh,
                          const BitVec& seed);

// 1 - (average acceptance probability). Enumeration uses exact_terms when
// present, otherwise iterates all 2^seed_bits seeds (seed_bits <= 20).
double exact_energy(const MeasurementHamiltonian& mh, const QuantumState& s);
double exact_energy_density(const MeasurementHamiltonian& mh,
                            const MatrixC& rho);
struct EnergyEstimate {
  double value = 0;
  double stderr_ = 0;
  int trials = 0;
};
EnergyEstimate sampled_energy(const MeasurementHamiltonian& mh,
                              const QuantumState& s, int trials, Rng& rng);

// Rebuild a pipeline from its recipe (inverse of the recorded steps).
MeasurementHamiltonian mh_from_recipe(const std::string& recipe,
                                      const HashSpec& hash);

}  // namespace qarg
