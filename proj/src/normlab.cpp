#include "qarg/normlab.hpp"

#include <cmath>

#include <nlohmann/json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

namespace qarg {

namespace {

void validate_state(const MatrixC& psi, double tol = 1e-10) {
  require(psi.rows() == psi.cols(), "state: not square");
  require(is_hermitian(psi, 1e-9), "state: not Hermitian");
  Eigen::SelfAdjointEigenSolver<MatrixC> es(psi);
  require(es.eigenvalues()(0) >= -tol, "state: not positive semidefinite");
  require(psi.trace().real() <= 1.0 + 1e-9, "state: trace above one");
}

double gaussian(Rng& rng) {
  double u = std::max(rng.next_double(), 1e-300);
  double v = rng.next_double();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
}

MatrixC kron_identity_right(const MatrixC& a, int r) {
  // a (x) 1_r
  MatrixC out = MatrixC::Zero(a.rows() * r, a.cols() * r);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (int k = 0; k < r; ++k) out(i * r + k, j * r + k) = a(i, j);
  return out;
}

}  // namespace

// ------------------------------------------------------------ state norms

double state_norm2(const MatrixC& a, const MatrixC& psi) {
  require(a.cols() == psi.rows(), "state_norm: dimension mismatch");
  return ((a.adjoint() * a) * psi).trace().real();
}

double state_norm(const MatrixC& a, const MatrixC& psi) {
  validate_state(psi);
  return std::sqrt(std::max(0.0, state_norm2(a, psi)));
}

double trace_norm(const MatrixC& a) {
  require(is_hermitian(a, 1e-8), "trace_norm: expects a Hermitian argument");
  Eigen::SelfAdjointEigenSolver<MatrixC> es(a);
  return es.eigenvalues().cwiseAbs().sum();
}

// -------------------------------------------------------------- families

ObservableFamily pauli_z_family(int qubits) {
  ObservableFamily f;
  f.label = "pauli-Z";
  f.n = qubits;
  f.exactly_linear = true;
  f.at = [qubits](uint64_t a) {
    return word_to_dense(PauliWord{qubits, +1, 0, a});
  };
  return f;
}

ObservableFamily pauli_x_family(int qubits) {
  ObservableFamily f;
  f.label = "pauli-X";
  f.n = qubits;
  f.exactly_linear = true;
  f.at = [qubits](uint64_t b) {
    return word_to_dense(PauliWord{qubits, +1, b, 0});
  };
  return f;
}

ObservableFamily conjugated_family(const ObservableFamily& base,
                                   const MatrixC& u, const std::string& tag) {
  ObservableFamily f;
  f.label = base.label + "/" + tag;
  f.n = base.n;
  f.exactly_linear = base.exactly_linear;
  auto at = base.at;
  MatrixC uc = u;
  f.at = [at, uc](uint64_t a) -> MatrixC { return uc * at(a) * uc.adjoint(); };
  return f;
}

ObservableFamily diagonal_character_family(
    int n, const std::vector<uint64_t>& chars) {
  ObservableFamily f;
  f.label = "diag";
  f.n = n;
  f.exactly_linear = true;
  auto cs = std::make_shared<std::vector<uint64_t>>(chars);
  f.at = [cs](uint64_t a) {
    MatrixC m = MatrixC::Zero(Eigen::Index(cs->size()),
                              Eigen::Index(cs->size()));
    for (size_t i = 0; i < cs->size(); ++i)
      m(Eigen::Index(i), Eigen::Index(i)) =
          parity64((*cs)[i] & a) ? -1.0 : 1.0;
    return m;
  };
  return f;
}

// ------------------------------------------------------- random instances

MatrixC random_unitary(int dim, Rng& rng) {
  MatrixC g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      g(i, j) = Complex(gaussian(rng), gaussian(rng));
  Eigen::HouseholderQR<MatrixC> qr(g);
  MatrixC q = qr.householderQ();
  MatrixC r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    Complex d = r(i, i);
    q.col(i) *= d / std::abs(d);
  }
  return q;
}

MatrixC random_density(int dim, Rng& rng, double trace) {
  MatrixC g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      g(i, j) = Complex(gaussian(rng), gaussian(rng));
  MatrixC rho = g * g.adjoint();
  return rho * (trace / rho.trace().real());
}

MatrixC random_binary_observable(int dim, Rng& rng) {
  MatrixC u = random_unitary(dim, rng);
  MatrixC d = MatrixC::Zero(dim, dim);
  bool saw_plus = false, saw_minus = false;
  for (Eigen::Index i = 0; i < dim; ++i) {
    bool plus = rng.next_bit();
    if (i == dim - 2 && !saw_plus) plus = true;
    if (i == dim - 1 && !saw_minus) plus = false;
    saw_plus |= plus;
    saw_minus |= !plus;
    d(i, i) = plus ? 1.0 : -1.0;
  }
  return u * d * u.adjoint();
}

VectorC random_pure_vector(int dim, Rng& rng) {
  VectorC v(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    v(i) = Complex(gaussian(rng), gaussian(rng));
  v /= v.norm();
  return v;
}

// -------------------------------------------------------------- residuals

std::vector<MaskPair> uniform_pairs(int n) {
  std::vector<MaskPair> out;
  uint64_t count = uint64_t{1} << n;
  double w = 1.0 / double(count * count);
  for (uint64_t a = 0; a < count; ++a)
    for (uint64_t b = 0; b < count; ++b) out.push_back({a, b, w});
  return out;
}

double commutator_residual(const ObservableFamily& zfam,
                           const ObservableFamily& xfam, const MatrixC& psi,
                           const std::vector<MaskPair>& dist) {
  validate_state(psi);
  double total = 0;
  for (const auto& p : dist) {
    MatrixC z = zfam.at(p.a), x = xfam.at(p.b);
    require(z.rows() == psi.rows() && x.rows() == psi.rows(),
            "commutator_residual: dimension mismatch");
    double sign = parity64(p.a & p.b) ? -1.0 : 1.0;
    total += p.weight * state_norm2(z * x - sign * x * z, psi);
  }
  return total;
}

// ------------------------------------------------------------- dls checks

DlsResult dls_check(const MatrixC& m, const ObservableFamily& wfam,
                    const MatrixC& rho, const BiasedSet& s, double delta) {
  validate_state(rho);
  require(wfam.exactly_linear, "dls_check: family must be exactly linear");
  double bias = bias_of(s);
  require(bias < 1.0, "dls_check: set bias must be below one");
  auto comm2 = [&](uint64_t a) {
    MatrixC w = wfam.at(a);
    return state_norm2(w * m - m * w, rho);
  };
  DlsResult r;
  uint64_t count = uint64_t{1} << wfam.n;
  for (uint64_t a = 0; a < count; ++a) r.lhs += comm2(a);
  r.lhs /= double(count);
  double on_set = 0;
  for (uint64_t a : s.members) on_set += comm2(a);
  on_set /= double(s.size());
  r.rhs = on_set / (1.0 - bias) + 2.0 * delta / (1.0 - bias);
  r.holds = r.lhs <= r.rhs + 1e-9;
  return r;
}

DlsResult dls_anticom_check(const ObservableFamily& zfam,
                            const ObservableFamily& xfam, const MatrixC& rho,
                            const BiasedSet& s, double delta) {
  validate_state(rho);
  require(zfam.exactly_linear && xfam.exactly_linear,
          "dls_anticom: families must be exactly linear");
  double bias = bias_of(s);
  require(bias < 1.0, "dls_anticom: set bias must be below one");
  auto term = [&](uint64_t a, uint64_t b) {
    MatrixC z = zfam.at(a), x = xfam.at(b);
    double sign = parity64(a & b) ? -1.0 : 1.0;
    return state_norm2(z * x - sign * x * z, rho);
  };
  DlsResult r;
  uint64_t count = uint64_t{1} << zfam.n;
  for (uint64_t a = 0; a < count; ++a)
    for (uint64_t b = 0; b < count; ++b) r.lhs += term(a, b);
  r.lhs /= double(count * count);
  double on_set = 0;
  for (uint64_t a : s.members)
    for (uint64_t b : s.members) on_set += term(a, b);
  on_set /= double(s.size()) * double(s.size());
  double om = 1.0 - bias;
  r.rhs = on_set / (om * om) + 2.0 * delta * (2.0 - bias) / (om * om);
  r.holds = r.lhs <= r.rhs + 1e-9;
  return r;
}

// -------------------------------------------------- Heisenberg-Weyl group

HwGroup HwGroup::make(int n) {
  require(n >= 1 && n <= 2, "HwGroup: table enumerated only for n <= 2");
  HwGroup g;
  g.n = n;
  uint64_t masks = uint64_t{1} << n;
  for (int sign = 0; sign < 2; ++sign)
    for (uint64_t x = 0; x < masks; ++x)
      for (uint64_t z = 0; z < masks; ++z)
        g.elements.push_back({n, int8_t(sign ? -1 : 1), x, z});
  return g;
}

int HwGroup::index_of(const PauliWord& w) const {
  uint64_t masks = uint64_t{1} << n;
  uint64_t idx = (w.phase < 0 ? masks * masks : 0) + w.xmask * masks + w.zmask;
  require(elements[size_t(idx)] == w, "HwGroup: index mismatch");
  return int(idx);
}

int HwGroup::mul(int i, int j) const {
  return index_of(word_mul(elements[size_t(i)], elements[size_t(j)]));
}

int HwGroup::inverse(int i) const {
  for (int j = 0; j < order(); ++j)
    if (word_mul(elements[size_t(i)], elements[size_t(j)]) ==
        PauliWord::identity(n))
      return j;
  throw Error("HwGroup: no inverse found");
}

int HwGroup::neg_identity() const {
  return index_of(PauliWord{n, -1, 0, 0});
}

GroupFunction fundamental_rep(int n) {
  GroupFunction f;
  f.group = HwGroup::make(n);
  for (const auto& w : f.group.elements) f.table.push_back(word_to_dense(w));
  return f;
}

GroupFunction one_dim_sign_rep(int n, uint64_t beta, uint64_t gamma) {
  GroupFunction f;
  f.group = HwGroup::make(n);
  for (const auto& w : f.group.elements) {
    double chi =
        (parity64(w.xmask & beta) ^ parity64(w.zmask & gamma)) ? -1.0 : 1.0;
    MatrixC m(1, 1);
    m << chi;
    f.table.push_back(m);
  }
  return f;
}

GroupFunction perturbed_rep(const GroupFunction& base, double theta,
                            Rng& rng) {
  GroupFunction f;
  f.group = base.group;
  for (const auto& m : base.table) {
    int dim = int(m.rows());
    MatrixC g(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j)
        g(i, j) = Complex(gaussian(rng), gaussian(rng));
    MatrixC h = (g + g.adjoint()) / 2.0;
    h /= std::max(1e-12, h.norm());
    MatrixC rot = (Complex(0, theta) * h).exp();
    f.table.push_back(rot * m * rot.adjoint());
  }
  return f;
}

// ----------------------------------------------------- rounding machinery

MatrixC RoundingResult::rounded(int element_index) const {
  // pi_reg is a permutation; reindex the isometry's group rows
  int ng = int(pi_reg.size());
  int r = kraus_rank;
  MatrixC moved = MatrixC::Zero(isometry.rows(), isometry.cols());
  const MatrixC& pi = pi_reg[size_t(element_index)];
  for (int g = 0; g < ng; ++g) {
    for (int h = 0; h < ng; ++h) {
      if (pi(g, h) == Complex(0, 0)) continue;
      moved.middleRows(Eigen::Index(g) * r, r) =
          pi(g, h) * isometry.middleRows(Eigen::Index(h) * r, r);
      break;
    }
  }
  return isometry.adjoint() * moved;
}

RoundingResult gh_round(const GroupFunction& f, const MatrixC& psi,
                        const std::vector<double>& mu) {
  const HwGroup& group = f.group;
  int ng = group.order();
  require(int(f.table.size()) == ng, "gh_round: table size mismatch");
  require(int(mu.size()) == ng, "gh_round: measure size mismatch");
  validate_state(psi);
  int d = int(f.table[0].rows());
  for (const auto& m : f.table)
    require(is_unitary(m, 1e-8), "gh_round: f must be unitary-valued");

  // convolution f*(g) = E_h f(h)^dag f(hg)
  std::vector<MatrixC> conv;
  conv.resize(size_t(ng));
  for (int g = 0; g < ng; ++g) {
    MatrixC acc = MatrixC::Zero(d, d);
    for (int h = 0; h < ng; ++h)
      acc += f.table[size_t(h)].adjoint() * f.table[size_t(group.mul(h, g))];
    conv[size_t(g)] = acc / double(ng);
  }

  // Choi operator of the linear extension phi(|g><h|) = f*(g^{-1} h)/|G|
  std::vector<int> inv(size_t(ng), 0);
  for (int g = 0; g < ng; ++g) inv[size_t(g)] = group.inverse(g);
  MatrixC choi = MatrixC::Zero(Eigen::Index(d) * ng, Eigen::Index(d) * ng);
  for (int g = 0; g < ng; ++g) {
    for (int h = 0; h < ng; ++h) {
      const MatrixC& blk = conv[size_t(group.mul(inv[size_t(g)], h))];
      for (int x = 0; x < d; ++x)
        for (int y = 0; y < d; ++y)
          choi(Eigen::Index(x) * ng + g, Eigen::Index(y) * ng + h) =
              blk(x, y) / double(ng);
    }
  }

  Eigen::SelfAdjointEigenSolver<MatrixC> es(choi);
  RoundingResult out;
  out.choi_min_eigenvalue = es.eigenvalues()(0);
  require(out.choi_min_eigenvalue > -1e-9,
          "gh_round: Choi operator is not PSD; the f table is not an "
          "approximate representation of unitaries");

  // Kraus operators from clipped eigenpairs; W_i maps H_G -> H
  std::vector<MatrixC> kraus;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double lam = std::max(es.eigenvalues()(i), 0.0);  // clip at -1e-12 scale
    if (lam < 1e-12) continue;
    MatrixC w(d, ng);
    for (int x = 0; x < d; ++x)
      for (int g = 0; g < ng; ++g)
        w(x, g) = std::sqrt(lam) * es.eigenvectors()(Eigen::Index(x) * ng + g, i);
    kraus.push_back(std::move(w));
  }
  int r = int(kraus.size());
  out.kraus_rank = r;

  // V = sum_i W_i^dag (x) |i>_K : rows indexed (g, i)
  out.isometry = MatrixC::Zero(Eigen::Index(ng) * r, d);
  for (int i = 0; i < r; ++i)
    for (int g = 0; g < ng; ++g)
      for (int x = 0; x < d; ++x)
        out.isometry(Eigen::Index(g) * r + i, x) =
            std::conj(kraus[size_t(i)](x, g));
  MatrixC gram = out.isometry.adjoint() * out.isometry;
  require((gram - MatrixC::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-9,
          "gh_round: dilation is not an isometry");

  // regular representation pi(g)|k> = |k g^{-1}>
  for (int g = 0; g < ng; ++g) {
    MatrixC pi = MatrixC::Zero(ng, ng);
    for (int k = 0; k < ng; ++k)
      pi(group.mul(k, inv[size_t(g)]), k) = 1.0;
    out.pi_reg.push_back(std::move(pi));
  }
  for (int g = 0; g < ng && g < 8; ++g)
    for (int h = 0; h < ng; ++h)
      require((out.pi_reg[size_t(g)] * out.pi_reg[size_t(h)] -
               out.pi_reg[size_t(group.mul(g, h))])
                      .cwiseAbs()
                      .maxCoeff() < 1e-12,
              "gh_round: regular representation is not a homomorphism");

  out.residual = 0;
  out.hypothesis = 0;
  for (int g = 0; g < ng; ++g) {
    if (mu[size_t(g)] == 0) continue;
    MatrixC m = out.rounded(g);
    out.residual += mu[size_t(g)] * state_norm2(f.table[size_t(g)] - m, psi);
    double hyp = 0;
    for (int h = 0; h < ng; ++h)
      hyp += state_norm2(f.table[size_t(h)] * f.table[size_t(g)] -
                             f.table[size_t(group.mul(h, g))],
                         psi);
    out.hypothesis += mu[size_t(g)] * hyp / double(ng);
  }
  out.implication_holds = out.residual <= out.hypothesis + 1e-8;
  return out;
}

AllDistResult rounding_all_dist_check(const ObservableFamily& zfam,
                                      const ObservableFamily& xfam,
                                      const MatrixC& psi,
                                      const std::vector<MaskPair>& mu,
                                      double pinned_constant) {
  int n = zfam.n;
  require(n == xfam.n && n <= 2, "rounding_all_dist: n <= 2");
  require(zfam.exactly_linear && xfam.exactly_linear,
          "rounding_all_dist: families must be exactly linear");
  validate_state(psi);
  // twirl invariance must hold exactly for the switch to all distributions
  uint64_t masks = uint64_t{1} << n;
  for (const ObservableFamily* fam : {&zfam, &xfam}) {
    MatrixC avg = MatrixC::Zero(psi.rows(), psi.cols());
    for (uint64_t a = 0; a < masks; ++a) {
      MatrixC w = fam->at(a);
      avg += w * psi * w;
    }
    avg /= double(masks);
    require((avg - psi).cwiseAbs().maxCoeff() < 1e-9,
            "rounding_all_dist: state is not exactly twirl-invariant");
  }

  HwGroup group = HwGroup::make(n);
  int ng = group.order();
  GroupFunction f;
  f.group = group;
  for (const auto& w : group.elements) {
    // canonical (s, x, z) = s sigma_X(x) sigma_Z(z)
    //                     = s (-1)^{x.z} sigma_Z(z) sigma_X(x)
    double sgn = (w.phase < 0) ^ (parity64(w.xmask & w.zmask) != 0) ? -1.0
                                                                    : 1.0;
    f.table.push_back(sgn * (zfam.at(w.zmask) * xfam.at(w.xmask)));
  }

  std::vector<double> unif(size_t(ng), 1.0 / double(ng));
  RoundingResult rr = gh_round(f, psi, unif);

  // replace the full regular representation with copies of the fundamental
  // one via its matrix-coefficient basis
  GroupFunction fund = fundamental_rep(n);
  int df = 1 << n;
  MatrixC u = MatrixC::Zero(ng, ng);
  double scale = std::sqrt(double(df) / double(ng));
  for (int j = 0; j < df; ++j)
    for (int k = 0; k < df; ++k)
      for (int h = 0; h < ng; ++h)
        u(h, Eigen::Index(j) * df + k) = scale * fund.table[size_t(h)](j, k);
  // one-dimensional irreps fill out the remaining columns
  int col = df * df;
  for (uint64_t beta = 0; beta < masks; ++beta) {
    for (uint64_t gamma = 0; gamma < masks; ++gamma) {
      for (int h = 0; h < ng; ++h) {
        const PauliWord& w = group.elements[size_t(h)];
        double chi = (parity64(w.xmask & beta) ^ parity64(w.zmask & gamma))
                         ? -1.0
                         : 1.0;
        u(h, col) = chi / std::sqrt(double(ng));
      }
      ++col;
    }
  }
  require(is_unitary(u, 1e-9), "rounding_all_dist: Peter-Weyl basis");
  // the basis must intertwine the regular representation blockwise:
  // pi_reg(g) . B_j = B_j . fund(g) for each copy j
  for (int g = 0; g < ng; ++g) {
    MatrixC lhs = rr.pi_reg[size_t(g)] * u.leftCols(df * df);
    MatrixC expect(ng, df * df);
    for (int j = 0; j < df; ++j)
      expect.middleCols(Eigen::Index(j) * df, df) =
          u.middleCols(Eigen::Index(j) * df, df) * fund.table[size_t(g)];
    require((lhs - expect).cwiseAbs().maxCoeff() < 1e-9,
            "rounding_all_dist: intertwiner check failed");
  }

  int copies = 2 * df;  // df from the regular block, df from the 1-dim block
  AllDistResult out;
  out.epsilon = commutator_residual(zfam, xfam, psi, uniform_pairs(n));
  int r = rr.kraus_rank;
  for (const auto& p : mu) {
    PauliWord g = word_mul(PauliWord{n, +1, 0, p.a}, PauliWord{n, +1, p.b, 0});
    int gi = group.index_of(g);
    // pi'(g) = U (1_{2 df} (x) fund(g)) U^dag
    MatrixC block = MatrixC::Zero(ng, ng);
    for (int c = 0; c < copies; ++c)
      block.block(Eigen::Index(c) * df, Eigen::Index(c) * df, df, df) =
          fund.table[size_t(gi)];
    MatrixC pi_prime = u * block * u.adjoint();
    // apply (pi' (x) 1_K) to the isometry rows
    MatrixC moved = MatrixC::Zero(rr.isometry.rows(), rr.isometry.cols());
    for (int i = 0; i < r; ++i) {
      MatrixC slice(ng, rr.isometry.cols());
      for (int h = 0; h < ng; ++h)
        slice.row(h) = rr.isometry.row(Eigen::Index(h) * r + i);
      MatrixC ms = pi_prime * slice;
      for (int h = 0; h < ng; ++h)
        moved.row(Eigen::Index(h) * r + i) = ms.row(h);
    }
    MatrixC m = rr.isometry.adjoint() * moved;
    MatrixC target = zfam.at(p.a) * xfam.at(p.b);
    out.residual += p.weight * state_norm2(target - m, psi);
  }
  out.constant = out.epsilon > 1e-12 ? out.residual / out.epsilon : 0.0;
  out.holds = out.residual <= pinned_constant * out.epsilon + 1e-6;
  out.flag_large_constant = out.constant > 100.0;
  return out;
}

IrrepCount hw_regular_irrep_counts(int n) {
  HwGroup group = HwGroup::make(n);
  int ng = group.order();
  GroupFunction fund = fundamental_rep(n);
  std::vector<int> inv(size_t(ng), 0);
  for (int g = 0; g < ng; ++g) inv[size_t(g)] = group.inverse(g);
  // character of the regular representation, computed from the permutation
  // structure (trace counts fixed points of k -> k g^{-1})
  std::vector<double> chi_reg(size_t(ng), 0.0);
  for (int g = 0; g < ng; ++g) {
    int fixed = 0;
    for (int k = 0; k < ng; ++k)
      if (group.mul(k, inv[size_t(g)]) == k) ++fixed;
    chi_reg[size_t(g)] = double(fixed);
  }
  IrrepCount out;
  uint64_t masks = uint64_t{1} << n;
  for (uint64_t beta = 0; beta < masks; ++beta) {
    for (uint64_t gamma = 0; gamma < masks; ++gamma) {
      double mult = 0;
      for (int g = 0; g < ng; ++g) {
        const PauliWord& w = group.elements[size_t(g)];
        double chi = (parity64(w.xmask & beta) ^ parity64(w.zmask & gamma))
                         ? -1.0
                         : 1.0;
        mult += chi_reg[size_t(g)] * chi;
      }
      mult /= double(ng);
      if (std::abs(mult - 1.0) < 1e-9) ++out.one_dimensional;
    }
  }
  double mult_f = 0;
  for (int g = 0; g < ng; ++g)
    mult_f +=
        chi_reg[size_t(g)] * fund.table[size_t(g)].trace().real();
  mult_f /= double(ng);
  out.fundamental = int(std::lround(mult_f));
  int df = 1 << n;
  out.dims_consistent =
      out.one_dimensional + out.fundamental * df == ng;
  return out;
}

// ------------------------------------------------ measurement diagnostics

ParsevalResult parseval_check(const std::vector<MatrixC>& mfam,
                              const PauliString& w, const MatrixC& isometry,
                              const MatrixC& psi) {
  int n = w.size();
  uint64_t count = uint64_t{1} << n;
  require(mfam.size() == count, "parseval: family size");
  validate_state(psi);
  Eigen::Index dim = mfam[0].rows();
  MatrixC total = MatrixC::Zero(dim, dim);
  for (const auto& m : mfam) total += m;
  require((total - MatrixC::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-8,
          "parseval: family is not complete");
  Eigen::Index big = isometry.rows();
  require(isometry.cols() == dim, "parseval: isometry domain mismatch");
  require(big % (Eigen::Index{1} << n) == 0, "parseval: codomain shape");
  int r = int(big >> n);

  ParsevalResult out;
  for (uint64_t u = 0; u < count; ++u) {
    MatrixC target = kron_identity_right(pauli_projector(w, u), r);
    out.lhs += state_norm2(mfam[size_t(u)] -
                               isometry.adjoint() * target * isometry,
                           psi);
  }
  for (uint64_t a = 0; a < count; ++a) {
    MatrixC obs = MatrixC::Zero(dim, dim);
    for (uint64_t u = 0; u < count; ++u)
      obs += (parity64(a & u) ? -1.0 : 1.0) * mfam[size_t(u)];
    MatrixC target =
        kron_identity_right(word_to_dense(sigma_w(w, a)), r);
    out.rhs += state_norm2(obs - isometry.adjoint() * target * isometry, psi);
  }
  out.rhs /= double(count);
  out.equal = std::abs(out.lhs - out.rhs) <= 1e-9;
  return out;
}

FactorisationResult factorisation_check(const std::vector<MatrixC>& mfam,
                                        const PauliString& w) {
  int n = w.size();
  uint64_t count = uint64_t{1} << n;
  require(mfam.size() == count, "factorisation: family size");
  FactorisationResult out;
  uint64_t identity_mask = 0;
  for (int i = 0; i < n; ++i)
    if (w[i] == Letter::I) identity_mask |= uint64_t{1} << i;
  for (uint64_t u = 0; u < count; ++u) {
    if ((u & identity_mask) && mfam[size_t(u)].cwiseAbs().maxCoeff() > 1e-12) {
      out.convention_violated = true;
      return out;
    }
  }
  uint64_t xmask = 0, zmask = 0;
  for (int i = 0; i < n; ++i) {
    if (w[i] == Letter::X) xmask |= uint64_t{1} << i;
    if (w[i] == Letter::Z) zmask |= uint64_t{1} << i;
  }
  Eigen::Index dim = mfam[0].rows();
  MatrixC ow = MatrixC::Zero(dim, dim), ox = ow, oz = ow;
  for (uint64_t u = 0; u < count; ++u) {
    ow += (parity64(u) ? -1.0 : 1.0) * mfam[size_t(u)];
    ox += (parity64(u & xmask) ? -1.0 : 1.0) * mfam[size_t(u)];
    oz += (parity64(u & zmask) ? -1.0 : 1.0) * mfam[size_t(u)];
  }
  out.defect = (ow - ox * oz).cwiseAbs().maxCoeff();
  out.holds = out.defect <= 1e-10;
  return out;
}

double consistency_sign_check(const ObservableFamily& wfam, uint64_t b,
                              const std::vector<DecodedBranch>& branches) {
  MatrixC w = wfam.at(b);
  MatrixC eye = MatrixC::Identity(w.rows(), w.cols());
  double total = 0;
  for (const auto& br : branches) {
    require(br.state.rows() == w.rows(),
            "consistency_sign_check: branch dimension mismatch");
    double sign = parity64(br.decoded & b) ? -1.0 : 1.0;
    total += state_norm2(w - sign * eye, br.state);
  }
  return total;
}

double twirl_invariance_check(const ObservableFamily& wfam,
                              const MatrixC& psi,
                              const std::vector<uint64_t>& masks) {
  double worst = 0;
  for (uint64_t b : masks) {
    MatrixC w = wfam.at(b);
    worst = std::max(worst, trace_norm(w * psi * w - psi));
  }
  return worst;
}

std::string check_records_to_json(const std::vector<CheckRecord>& records) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : records)
    j.push_back({{"check", r.name},
                 {"parameters", r.parameters},
                 {"lhs", r.lhs},
                 {"rhs", r.rhs},
                 {"verdict", r.verdict}});
  return j.dump();
}

}  // namespace qarg
