#include <doctest.h>

#include "qarg/compiler.hpp"
#include <unsupported/Eigen/MatrixFunctions>

#include "qarg/normlab.hpp"

using namespace qarg;

namespace {

std::vector<MatrixC> random_projective_family(const PauliString& w, int dim,
                                              Rng& rng) {
  int n = w.size();
  uint64_t count = uint64_t{1} << n;
  // live outcomes: zero wherever an identity letter would force a one
  std::vector<uint64_t> live;
  uint64_t id_mask = 0;
  for (int i = 0; i < n; ++i)
    if (w[i] == Letter::I) id_mask |= uint64_t{1} << i;
  for (uint64_t u = 0; u < count; ++u)
    if ((u & id_mask) == 0) live.push_back(u);
  MatrixC u = random_unitary(dim, rng);
  // split the basis into |live| random contiguous rank blocks
  std::vector<int> ranks(live.size(), 0);
  for (int i = 0; i < dim; ++i) ranks[size_t(rng.next_below(live.size()))]++;
  std::vector<MatrixC> fam(size_t(count),
                           MatrixC::Zero(dim, dim));
  int col = 0;
  for (size_t k = 0; k < live.size(); ++k) {
    MatrixC p = MatrixC::Zero(dim, dim);
    for (int r = 0; r < ranks[k]; ++r, ++col)
      p += u.col(col) * u.col(col).adjoint();
    fam[size_t(live[k])] = p;
  }
  return fam;
}

}  // namespace

TEST_CASE("state norm basics and the five properties") {
  Rng rng(90);
  int dim = 6;
  MatrixC eye = MatrixC::Identity(dim, dim);
  MatrixC psi = random_density(dim, rng);
  CHECK(state_norm(eye, psi) == doctest::Approx(1.0).epsilon(1e-10));
  for (int trial = 0; trial < 50; ++trial) {
    MatrixC a(dim, dim), b(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j) {
        a(i, j) = Complex(rng.next_double() - 0.5, rng.next_double() - 0.5);
        b(i, j) = Complex(rng.next_double() - 0.5, rng.next_double() - 0.5);
      }
    MatrixC u = random_unitary(dim, rng);
    MatrixC psi2 = random_density(dim, rng, 0.4);
    // (1) ||A||_{B psi B^dag} = ||AB||_psi
    CHECK(state_norm2(a, b * psi * b.adjoint()) ==
          doctest::Approx(state_norm2(a * b, psi)).epsilon(1e-9));
    // (2) ||AB||_psi <= ||A||_inf ||B||_psi
    Eigen::JacobiSVD<MatrixC> svd(a);
    double opnorm = svd.singularValues()(0);
    CHECK(state_norm(a * b, psi) <= opnorm * state_norm(b, psi) + 1e-9);
    // (3) left unitary invariance
    CHECK(state_norm(u * a, psi) ==
          doctest::Approx(state_norm(a, psi)).epsilon(1e-9));
    // (4) linearity in the state
    CHECK(state_norm2(a, psi * 0.5 + psi2 * 0.5) ==
          doctest::Approx(0.5 * state_norm2(a, psi) +
                          0.5 * state_norm2(a, psi2))
              .epsilon(1e-9));
    // (5) squared triangle inequality with factor two
    CHECK(state_norm2(a + b, psi) <=
          2 * state_norm2(a, psi) + 2 * state_norm2(b, psi) + 1e-9);
  }
}

TEST_CASE("state replacement bound") {
  Rng rng(91);
  int dim = 5;
  for (int trial = 0; trial < 50; ++trial) {
    MatrixC a = random_binary_observable(dim, rng);
    MatrixC psi = random_density(dim, rng);
    MatrixC psi2 = random_density(dim, rng);
    double eps = trace_norm(psi - psi2);
    // binary observables have operator norm one
    CHECK(std::abs(state_norm2(a, psi) - state_norm2(a, psi2)) <=
          eps + 1e-9);
  }
}

TEST_CASE("summed trace norms bound by the root of summed norms") {
  Rng rng(92);
  int dim = 5;
  for (int trial = 0; trial < 50; ++trial) {
    int parts = 3;
    double lhs = 0, rhs = 0;
    for (int i = 0; i < parts; ++i) {
      MatrixC a(dim, dim);
      for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c)
          a(r, c) = Complex(rng.next_double() - 0.5, rng.next_double() - 0.5);
      MatrixC psi = random_density(dim, rng, 1.0 / parts);
      MatrixC prod = a * psi;
      Eigen::JacobiSVD<MatrixC> svd(prod);
      lhs += svd.singularValues().sum();  // ||A psi||_1
      rhs += state_norm2(a, psi);
    }
    CHECK(lhs <= std::sqrt(rhs) + 1e-9);
  }
}

TEST_CASE("non-psd states are rejected") {
  MatrixC bad(2, 2);
  bad << 1.0, 0.0, 0.0, -0.5;
  CHECK_THROWS_AS(state_norm(MatrixC::Identity(2, 2), bad), Error);
}

TEST_CASE("commutator residual vanishes exactly for true Paulis") {
  int n = 2;
  MatrixC psi = MatrixC::Identity(4, 4) / 4.0;
  double r = commutator_residual(pauli_z_family(n), pauli_x_family(n), psi,
                                 uniform_pairs(n));
  CHECK(r <= 1e-12);
}

TEST_CASE("commutator residual of a commuting family has a closed form") {
  // same diagonal family on both sides: the residual of each pair is
  // 2 - 2(-1)^{a.b}, so the average is 4 Pr[a.b = 1]
  int n = 3;
  std::vector<uint64_t> chars;
  for (uint64_t i = 0; i < 8; ++i) chars.push_back(i);
  auto fam = diagonal_character_family(n, chars);
  MatrixC psi = MatrixC::Identity(8, 8) / 8.0;
  double r = commutator_residual(fam, fam, psi, uniform_pairs(n));
  double odd = 0;
  for (const auto& p : uniform_pairs(n)) odd += p.weight * parity64(p.a & p.b);
  CHECK(r == doctest::Approx(4.0 * odd).epsilon(1e-10));
}

TEST_CASE("perturbed pauli residual grows with the angle") {
  Rng rng(93);
  int n = 2;
  MatrixC psi = MatrixC::Identity(4, 4) / 4.0;
  double last = -1;
  for (double theta : {0.02, 0.1, 0.3, 0.6}) {
    MatrixC uz = random_unitary(4, rng), ux = random_unitary(4, rng);
    // partial rotation toward a fixed random frame
    MatrixC wz = (Complex(0, theta) * (uz + uz.adjoint())).exp();
    MatrixC wx = (Complex(0, theta) * (ux + ux.adjoint())).exp();
    auto zf = conjugated_family(pauli_z_family(n), wz, "rot");
    auto xf = conjugated_family(pauli_x_family(n), wx, "rot");
    double r = commutator_residual(zf, xf, psi, uniform_pairs(n));
    CHECK(r > last);
    last = r;
  }
}

TEST_CASE("dls commutator lifting holds on randomized instances") {
  Rng rng(94);
  for (int n : {4, 5, 6}) {
    auto S = construct_biased(n, 0.5);
    for (int trial = 0; trial < 8; ++trial) {
      int dim = 8;
      std::vector<uint64_t> chars;
      for (int i = 0; i < dim; ++i)
        chars.push_back(rng.next_u64() & ((uint64_t{1} << n) - 1));
      auto wfam = diagonal_character_family(n, chars);
      MatrixC m = random_binary_observable(dim, rng);
      MatrixC rho = MatrixC::Identity(dim, dim) / double(dim);
      auto res = dls_check(m, wfam, rho, S, 0.0);
      CHECK(res.holds);
    }
  }
}

TEST_CASE("dls trivial case: commuting M gives zero on both sides") {
  int n = 4;
  auto S = construct_biased(n, 0.5);
  auto wfam = diagonal_character_family(n, {0, 1, 2, 3, 4, 5, 6, 7});
  MatrixC m = MatrixC::Identity(8, 8);  // commutes with everything
  MatrixC rho = MatrixC::Identity(8, 8) / 8.0;
  auto res = dls_check(m, wfam, rho, S, 0.0);
  CHECK(res.lhs == doctest::Approx(0.0));
  CHECK(res.holds);
}

TEST_CASE("dls anticommutator form on structured families") {
  Rng rng(95);
  for (int n : {4, 5}) {
    auto S = construct_biased(n, 0.5);
    for (int trial = 0; trial < 4; ++trial) {
      int dim = 8;
      std::vector<uint64_t> zc, xc;
      for (int i = 0; i < dim; ++i) {
        zc.push_back(rng.next_u64() & ((uint64_t{1} << n) - 1));
        xc.push_back(rng.next_u64() & ((uint64_t{1} << n) - 1));
      }
      auto zfam = diagonal_character_family(n, zc);
      MatrixC g = random_unitary(dim, rng);
      auto xfam =
          conjugated_family(diagonal_character_family(n, xc), g, "conj");
      MatrixC rho = MatrixC::Identity(dim, dim) / double(dim);
      auto res = dls_anticom_check(zfam, xfam, rho, S, 0.0);
      CHECK(res.holds);
    }
  }
}

TEST_CASE("heisenberg-weyl group table") {
  for (int n : {1, 2}) {
    auto g = HwGroup::make(n);
    CHECK(g.order() == 2 * (1 << (2 * n)));
    // closure and inverses
    for (int i = 0; i < g.order(); ++i) {
      CHECK(g.mul(i, g.inverse(i)) ==
            g.index_of(PauliWord::identity(n)));
    }
  }
}

TEST_CASE("gh_round: exact representations give zero residual") {
  for (int n : {1, 2}) {
    auto f = fundamental_rep(n);
    int ng = f.group.order();
    MatrixC psi =
        MatrixC::Identity(1 << n, 1 << n) / double(1 << n);
    std::vector<double> mu(size_t(ng), 1.0 / ng);
    auto rr = gh_round(f, psi, mu);
    CHECK(rr.residual <= 1e-8);
    CHECK(rr.implication_holds);
    CHECK(rr.choi_min_eigenvalue >= -1e-9);
    // exactly multiplicative f reproduces itself through the dilation
    for (int g = 0; g < ng; ++g) {
      CHECK((rr.rounded(g) - f.table[size_t(g)]).cwiseAbs().maxCoeff() <
            1e-8);
    }
  }
}

TEST_CASE("gh_round: one-dimensional sign representation rounds to itself") {
  auto f = one_dim_sign_rep(1, 1, 0);
  MatrixC psi = MatrixC::Identity(1, 1);
  std::vector<double> mu(size_t(f.group.order()), 1.0 / f.group.order());
  auto rr = gh_round(f, psi, mu);
  CHECK(rr.residual <= 1e-10);
}

TEST_CASE("gh_round: perturbed representations obey the implication") {
  Rng rng(96);
  for (int n : {1, 2}) {
    MatrixC psi = MatrixC::Identity(1 << n, 1 << n) / double(1 << n);
    int ng = HwGroup::make(n).order();
    std::vector<double> mu(size_t(ng), 1.0 / ng);
    double last_hyp = 0;
    for (double theta : {0.01, 0.05, 0.1, 0.25, 0.5}) {
      auto f = perturbed_rep(fundamental_rep(n), theta, rng);
      auto rr = gh_round(f, psi, mu);
      CHECK(rr.implication_holds);
      CHECK(rr.residual <= rr.hypothesis + 1e-8);
      CHECK(rr.hypothesis >= last_hyp - 1e-6);  // roughly monotone in theta
      last_hyp = rr.hypothesis;
    }
  }
}

TEST_CASE("gh_round rejects non-unitary tables") {
  auto f = fundamental_rep(1);
  f.table[3] *= 2.0;
  MatrixC psi = MatrixC::Identity(2, 2) / 2.0;
  std::vector<double> mu(size_t(f.group.order()), 1.0 / f.group.order());
  CHECK_THROWS_AS(gh_round(f, psi, mu), Error);
}

TEST_CASE("regular representation contains the expected irreps") {
  for (int n : {1, 2}) {
    auto c = hw_regular_irrep_counts(n);
    CHECK(c.one_dimensional == (1 << (2 * n)));
    CHECK(c.fundamental == (1 << n));
    CHECK(c.dims_consistent);
  }
}

TEST_CASE("rounding for all distributions: exact paulis give zero") {
  int n = 2;
  MatrixC psi = MatrixC::Identity(4, 4) / 4.0;
  // a point distribution on one pair
  std::vector<MaskPair> mu{{0b01, 0b11, 1.0}};
  auto res = rounding_all_dist_check(pauli_z_family(n), pauli_x_family(n),
                                     psi, mu);
  CHECK(res.residual <= 1e-9);
  CHECK(res.holds);
}

TEST_CASE("rounding for all distributions on conjugated families") {
  Rng rng(97);
  int n = 2;
  MatrixC psi = MatrixC::Identity(4, 4) / 4.0;
  for (double theta : {0.01, 0.05, 0.1, 0.25}) {
    MatrixC h = random_unitary(4, rng);
    MatrixC rot = (Complex(0, theta) * (h + h.adjoint())).exp();
    auto zf = conjugated_family(pauli_z_family(n), rot, "z-rot");
    auto xf = pauli_x_family(n);
    // concentrated distribution: single pair
    std::vector<MaskPair> mu{{0b11, 0b01, 1.0}};
    auto res = rounding_all_dist_check(zf, xf, psi, mu);
    CHECK(res.holds);
    // uniform distribution reproduces the plain rounding residual scale
    auto unif = rounding_all_dist_check(zf, xf, psi, uniform_pairs(n));
    CHECK(unif.holds);
  }
}

TEST_CASE("parseval: identity isometry on exact projectors") {
  auto w = PauliString::parse("XZ");
  auto fam = pauli_projector_family(w);
  MatrixC v = MatrixC::Identity(4, 4);
  MatrixC psi = MatrixC::Identity(4, 4) / 4.0;
  auto res = parseval_check(fam, w, v, psi);
  CHECK(res.lhs <= 1e-12);
  CHECK(res.rhs <= 1e-12);
  CHECK(res.equal);
}

TEST_CASE("parseval equality on random projective families") {
  Rng rng(98);
  for (const char* ws : {"XZ", "ZX", "XXZ"}) {
    auto w = PauliString::parse(ws);
    int dim = 1 << w.size();
    for (int trial = 0; trial < 5; ++trial) {
      auto fam = random_projective_family(w, dim, rng);
      MatrixC psi = random_density(dim, rng);
      MatrixC v = MatrixC::Identity(dim, dim);
      auto res = parseval_check(fam, w, v, psi);
      CHECK(res.equal);
      // doubled-space random isometry: take the first dim columns of a
      // random unitary on dim * 2
      MatrixC big = random_unitary(dim * 2, rng);
      // pad to shape (2^n * r) x dim with r = 2
      MatrixC iso = big.leftCols(dim);
      auto res2 = parseval_check(fam, w, iso, psi);
      CHECK(res2.equal);
    }
  }
}

TEST_CASE("factorisation holds for convention-respecting families") {
  Rng rng(99);
  auto honest = pauli_projector_family(PauliString::parse("XZ"));
  auto res = factorisation_check(honest, PauliString::parse("XZ"));
  CHECK(res.holds);
  for (const char* ws : {"XZI", "ZZX", "IXZ"}) {
    auto w = PauliString::parse(ws);
    auto fam = random_projective_family(w, 1 << w.size(), rng);
    auto r = factorisation_check(fam, w);
    CHECK(!r.convention_violated);
    CHECK(r.holds);
  }
  // a family that breaks the identity convention is reported as such
  auto w = PauliString::parse("IZ");
  auto bad = pauli_projector_family(PauliString::parse("XZ"));
  auto rb = factorisation_check(bad, w);
  CHECK(rb.convention_violated);
}

TEST_CASE("consistency sign check: honest branches give zero") {
  int n = 2;
  XZHamiltonian h;
  h.n = n;
  h.terms.push_back({-1.0, {0, 1}, {Letter::Z, Letter::Z}});
  auto mh = mf_convert(h, -1, 1, 4, 0);
  auto S = construct_biased(n, 0.5);
  auto witness = QuantumState::from_amplitudes(
      n, ground_state(dense_hamiltonian(mh)));
  HonestContext ctx(witness, mh, S);
  Rng rng(100);

  // Bob observables on the full register: W(b) on his last n qubits
  int total = 3 * n + 2;
  auto bob_obs = [&](Basis basis) {
    ObservableFamily fam;
    fam.n = n;
    fam.label = "bob";
    fam.at = [=](uint64_t b) {
      PauliWord w{total, +1, 0, 0};
      for (int i = 0; i < n; ++i) {
        if (!((b >> i) & 1)) continue;
        int q = 2 * n + 2 + i;
        if (basis == Basis::Z)
          w.zmask |= uint64_t{1} << q;
        else
          w.xmask |= uint64_t{1} << q;
      }
      return word_to_dense(w);
    };
    return fam;
  };

  for (Basis basis : {Basis::Z, Basis::X}) {
    auto branches =
        ctx.alice_branches(PureBasisQ{basis}, ctx.initial_state());
    std::vector<DecodedBranch> decoded;
    for (auto& [ans, st] : branches)
      decoded.push_back({ans.bits.to_u64(), st.amp * st.amp.adjoint()});
    for (int trial = 0; trial < 10; ++trial) {
      uint64_t b = rng.next_u64() & ((uint64_t{1} << n) - 1);
      double r = consistency_sign_check(bob_obs(basis), b, decoded);
      CHECK(r <= 1e-9);
    }
  }
}

TEST_CASE("deviating bob shows a positive residual bounded by the twirl") {
  int n = 2;
  XZHamiltonian h;
  h.n = n;
  h.terms.push_back({-1.0, {0, 1}, {Letter::Z, Letter::Z}});
  auto mh = mf_convert(h, -1, 1, 4, 0);
  auto S = construct_biased(n, 0.5);
  auto witness = QuantumState::from_amplitudes(
      n, ground_state(dense_hamiltonian(mh)));
  HonestContext ctx(witness, mh, S);
  int total = 3 * n + 2;
  // Bob's effective observables rotated part-way on his first qubit: the
  // deviation neither commutes with the honest branches nor matches them
  ObservableFamily skew;
  skew.n = n;
  skew.label = "skew";
  skew.at = [=](uint64_t b) -> MatrixC {
    PauliWord w{total, +1, 0, 0};
    for (int i = 0; i < n; ++i)
      if ((b >> i) & 1) w.zmask |= uint64_t{1} << (2 * n + 2 + i);
    MatrixC m = word_to_dense(w);
    PauliWord flip{total, +1, uint64_t{1} << (2 * n + 2), 0};
    MatrixC x = word_to_dense(flip);
    MatrixC eye = MatrixC::Identity(m.rows(), m.cols());
    MatrixC rot = std::cos(0.4) * eye + Complex(0, std::sin(0.4)) * x;
    return rot * m * rot.adjoint();
  };
  auto branches = ctx.alice_branches(PureBasisQ{Basis::Z}, ctx.initial_state());
  std::vector<DecodedBranch> decoded;
  MatrixC mixed = MatrixC::Zero(1 << total, 1 << total);
  for (auto& [ans, st] : branches) {
    decoded.push_back({ans.bits.to_u64(), st.amp * st.amp.adjoint()});
    mixed += decoded.back().state;
  }
  double residual = consistency_sign_check(skew, 0b01, decoded);
  CHECK(residual > 1e-6);
  double tw = twirl_invariance_check(skew, mixed, {0b01});
  // trace distance stays within O(sqrt(residual)) of the sign residual
  CHECK(tw > 0);
  CHECK(tw <= 4.0 * std::sqrt(residual) + 1e-9);
}

TEST_CASE("twirl invariance: honest and maximally mixed cases vanish") {
  int n = 2;
  int dim = 1 << n;
  ObservableFamily zf = pauli_z_family(n);
  MatrixC mixed = MatrixC::Identity(dim, dim) / double(dim);
  CHECK(twirl_invariance_check(zf, mixed, {1, 2, 3}) <= 1e-10);
}

TEST_CASE("check records serialize") {
  std::vector<CheckRecord> recs{{"alpha", "n=2", 0.5, 1.0, true}};
  CHECK(!check_records_to_json(recs).empty());
}
