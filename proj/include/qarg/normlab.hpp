#pragma once

#include "qarg/pauli.hpp"
#include "qarg/rng.hpp"
#include "qarg/smallbias.hpp"
#include "qarg/types.hpp"

namespace qarg {

// ----------------------------------------------------------- state norms

// sqrt(Tr[A^dag A psi]) for subnormalized PSD psi
double state_norm(const MatrixC& a, const MatrixC& psi);
double state_norm2(const MatrixC& a, const MatrixC& psi);
double trace_norm(const MatrixC& a);

// ------------------------------------------------------------- families

// Binary observables indexed by bit masks; `exactly_linear` asserts
// W(a)W(b) = W(a+b).
struct ObservableFamily {
  std::string label;
  int n = 0;
  std::function<MatrixC(uint64_t)> at;
  bool exactly_linear = false;
};

ObservableFamily pauli_z_family(int qubits);
ObservableFamily pauli_x_family(int qubits);
// U W(a) U^dag; stays exactly linear
ObservableFamily conjugated_family(const ObservableFamily& base,
                                   const MatrixC& u, const std::string& tag);
// diag((-1)^{c_i . a}) from per-entry character assignments
ObservableFamily diagonal_character_family(int n,
                                           const std::vector<uint64_t>& chars);

// ------------------------------------------------------ random instances

MatrixC random_unitary(int dim, Rng& rng);
MatrixC random_density(int dim, Rng& rng, double trace = 1.0);
MatrixC random_binary_observable(int dim, Rng& rng);
VectorC random_pure_vector(int dim, Rng& rng);

// ------------------------------------------------------------ residuals

// E_{(a,b) ~ dist} || Z(a) X(b) - (-1)^{a.b} X(b) Z(a) ||^2_psi
struct MaskPair {
  uint64_t a = 0, b = 0;
  double weight = 1;
};
double commutator_residual(const ObservableFamily& zfam,
                           const ObservableFamily& xfam, const MatrixC& psi,
                           const std::vector<MaskPair>& dist);
std::vector<MaskPair> uniform_pairs(int n);

// ------------------------------------------------------------ dls checks

struct DlsResult {
  double lhs = 0, rhs = 0;
  bool holds = false;
};
// commutator lifting: full-cube average against the biased-set average
DlsResult dls_check(const MatrixC& m, const ObservableFamily& wfam,
                    const MatrixC& rho, const BiasedSet& s, double delta);
// anticommutator variant, carrying the squared 1/(1-bias) factor
DlsResult dls_anticom_check(const ObservableFamily& zfam,
                            const ObservableFamily& xfam, const MatrixC& rho,
                            const BiasedSet& s, double delta);

// --------------------------------------------------- Heisenberg-Weyl group

struct HwGroup {
  int n = 0;
  std::vector<PauliWord> elements;  // order 2 * 4^n

  static HwGroup make(int n);
  int order() const { return int(elements.size()); }
  int index_of(const PauliWord& w) const;
  int mul(int i, int j) const;
  int inverse(int i) const;
  int neg_identity() const;
};

struct GroupFunction {
  HwGroup group;
  std::vector<MatrixC> table;  // one unitary per element
};

GroupFunction fundamental_rep(int n);
GroupFunction one_dim_sign_rep(int n, uint64_t beta, uint64_t gamma);
// f(g) conjugated by independent random unitaries of rotation angle theta
GroupFunction perturbed_rep(const GroupFunction& base, double theta, Rng& rng);

// ------------------------------------------------------ rounding machinery

struct RoundingResult {
  MatrixC isometry;               // H -> H_G (x) K
  std::vector<MatrixC> pi_reg;    // regular representation table
  int kraus_rank = 0;
  double choi_min_eigenvalue = 0;
  double residual = 0;            // E_mu || f(g) - V^dag pi(g) V ||^2_psi
  double hypothesis = 0;          // E_{mu, h} || f(h)f(g) - f(hg) ||^2_psi
  bool implication_holds = false;

  // V^dag (pi_reg(g) (x) 1_K) V
  MatrixC rounded(int element_index) const;
};

// Stinespring dilation of the convolution map, with eigenvalue clipping at
// -1e-12 for numerical PSD repair.
RoundingResult gh_round(const GroupFunction& f, const MatrixC& psi,
                        const std::vector<double>& mu);

struct AllDistResult {
  double epsilon = 0;    // uniform commutation residual
  double residual = 0;   // E_mu against the fundamental-representation image
  double constant = 0;   // residual / epsilon, the measured constant
  bool holds = false;    // residual <= pinned_constant * epsilon + 1e-6
  // instances needing a constant above 100 are flagged, not failed
  bool flag_large_constant = false;
};
// Rounds exactly-linear families to Pauli words for an arbitrary pair
// distribution; `pinned_constant` is the calibrated constant the check is
// evaluated against.
AllDistResult rounding_all_dist_check(const ObservableFamily& zfam,
                                      const ObservableFamily& xfam,
                                      const MatrixC& psi,
                                      const std::vector<MaskPair>& mu,
                                      double pinned_constant = 16.0);

// multiplicities of the one-dimensional irreps and the fundamental irrep
// inside the numerically constructed regular representation
struct IrrepCount {
  int one_dimensional = 0;
  int fundamental = 0;
  bool dims_consistent = false;
};
IrrepCount hw_regular_irrep_counts(int n);

// ------------------------------------------------- measurement diagnostics

struct ParsevalResult {
  double lhs = 0, rhs = 0;
  bool equal = false;
};
// sum_u ||M_u - V^dag(pi^w_u (x) 1)V||^2 against its Fourier transform
ParsevalResult parseval_check(const std::vector<MatrixC>& mfam,
                              const PauliString& w, const MatrixC& isometry,
                              const MatrixC& psi);

struct FactorisationResult {
  bool holds = false;
  bool convention_violated = false;
  double defect = 0;
};
// O^w = O^w_X O^w_Z for projective families obeying the identity-forces-0
// convention
FactorisationResult factorisation_check(const std::vector<MatrixC>& mfam,
                                        const PauliString& w);

// sum_alpha || W(b) - (-1)^{dec(alpha) . b} 1 ||^2_{psi_alpha}
struct DecodedBranch {
  uint64_t decoded = 0;
  MatrixC state;  // subnormalized density matrix
};
double consistency_sign_check(const ObservableFamily& wfam, uint64_t b,
                              const std::vector<DecodedBranch>& branches);

// max_b || W(b) psi W(b) - psi ||_1 over the listed masks
double twirl_invariance_check(const ObservableFamily& wfam,
                              const MatrixC& psi,
                              const std::vector<uint64_t>& masks);

// JSON check record for report files
struct CheckRecord {
  std::string name;
  std::string parameters;
  double lhs = 0, rhs = 0;
  bool verdict = false;
};
std::string check_records_to_json(const std::vector<CheckRecord>& records);

}  // namespace qarg
