#include <doctest.h>

#include "qarg/hamiltonian.hpp"

using namespace qarg;

namespace {

const HashSpec kHash{{'h', 'a', 'm', '-', 't', 'e', 's', 't'}};

XZHamiltonian single_z() {
  XZHamiltonian h;
  h.n = 1;
  h.terms.push_back({+1.0, {0}, {Letter::Z}});
  return h;
}

QuantumState basis_state(int n, uint64_t index) {
  QuantumState s;
  s.qubits = n;
  s.amp = VectorC::Zero(dim_for_qubits(n));
  s.amp(Eigen::Index(index)) = 1.0;
  return s;
}

XZHamiltonian random_xz(int n, int terms, Rng& rng) {
  XZHamiltonian h;
  h.n = n;
  for (int i = 0; i < terms; ++i) {
    XZTerm t;
    t.coeff = 2.0 * rng.next_double() - 1.0;
    int q1 = int(rng.next_below(uint64_t(n)));
    t.qubits = {q1};
    t.bases = {rng.next_bit() ? Letter::X : Letter::Z};
    if (rng.next_bit()) {
      int q2 = int(rng.next_below(uint64_t(n)));
      if (q2 != q1) {
        t.qubits.push_back(q2);
        t.bases.push_back(rng.next_bit() ? Letter::X : Letter::Z);
      }
    }
    h.terms.push_back(std::move(t));
  }
  return h;
}

}  // namespace

TEST_CASE("bitvec basics") {
  BitVec v = BitVec::from_u64(0b1011, 4);
  CHECK(v.get(0) == 1);
  CHECK(v.get(2) == 0);
  CHECK(v.to_u64() == 0b1011);
  BitVec s = v.slice(1, 3);
  CHECK(s.to_u64() == 0b101);
  BitVec w = BitVec::from_u64(0b11, 2);
  w.append(v);
  CHECK(w.bits == 6);
  CHECK(w.to_u64() == (0b1011 << 2 | 0b11));
}

TEST_CASE("mf_convert maps energy extremes to acceptance extremes") {
  auto mh = mf_convert(single_z(), -1.0, 1.0);
  // ground state |1> of +Z accepts with certainty
  CHECK(exact_energy(mh, basis_state(1, 1)) == doctest::Approx(0.0));
  // maximal-energy state |0> is always rejected
  CHECK(exact_energy(mh, basis_state(1, 0)) == doctest::Approx(1.0));
  CHECK(mh.alpha == doctest::Approx(0.0));
  CHECK(mh.beta == doctest::Approx(1.0));
}

TEST_CASE("mf_convert energy matches the dense rescaled oracle") {
  Rng rng(21);
  for (int rep = 0; rep < 10; ++rep) {
    auto h = random_xz(3, 5, rng);
    bool all_zero = true;
    for (auto& t : h.terms) all_zero &= t.coeff == 0;
    if (all_zero) continue;
    auto mh = mf_convert(h, -3.0, 3.0);
    MatrixC hd = dense_hamiltonian(mh);
    VectorC gs = ground_state(hd);
    auto state = QuantumState::from_amplitudes(3, gs);
    CHECK(exact_energy(mh, state) ==
          doctest::Approx(ground_energy(hd)).epsilon(1e-9));
    // dense oracle built independently from the X/Z matrix
    double total = 0;
    for (auto& t : h.terms) total += std::abs(t.coeff);
    MatrixC rescaled = 0.5 * MatrixC::Identity(8, 8) + h.dense() / (2 * total);
    // quantization of term weights is the only gap; 24 bits is ~1e-7
    CHECK((hd - rescaled).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("all-zero coefficients rejected") {
  XZHamiltonian h;
  h.n = 1;
  h.terms.push_back({0.0, {0}, {Letter::Z}});
  CHECK_THROWS_AS(mf_convert(h, 0, 1), Error);
}

TEST_CASE("energy of degenerate acceptance sets") {
  MeasurementHamiltonian always;
  always.n = 2;
  always.seed_bits = 2;
  always.sample_w = [](const BitVec&) { return PauliString::parse("ZZ"); };
  always.accept = [](const BitVec&, const BitVec&) { return true; };
  Rng rng(3);
  auto s = basis_state(2, 2);
  CHECK(exact_energy(always, s) == doctest::Approx(0.0));

  MeasurementHamiltonian never = always;
  never.accept = [](const BitVec&, const BitVec&) { return false; };
  CHECK(exact_energy(never, s) == doctest::Approx(1.0));
}

TEST_CASE("sampled and enumerated energy agree within 4 sigma") {
  Rng rng(22);
  auto h = random_xz(3, 4, rng);
  auto mh = mf_convert(h, -3, 3);
  auto state = QuantumState::from_amplitudes(3, ground_state(dense_hamiltonian(mh)));
  double exact = exact_energy(mh, state);
  auto est = sampled_energy(mh, state, 20000, rng);
  CHECK(std::abs(est.value - exact) < 4 * est.stderr_ + 1e-9);
}

TEST_CASE("energy is affine in convex mixtures") {
  Rng rng(23);
  auto h = random_xz(2, 3, rng);
  auto mh = mf_convert(h, -2, 2);
  auto a = basis_state(2, 1);
  auto b = basis_state(2, 2);
  double lambda = 0.3;
  MatrixC rho = lambda * a.amp * a.amp.adjoint() +
                (1 - lambda) * b.amp * b.amp.adjoint();
  double mixed = exact_energy_density(mh, rho);
  double split = lambda * exact_energy(mh, a) + (1 - lambda) * exact_energy(mh, b);
  CHECK(mixed == doctest::Approx(split).epsilon(1e-9));
}

TEST_CASE("ksv binomial tails at the acceptance-gate operating point") {
  double yes = ksv_amplified_accept(0.9, 60, 0.1, 0.9);
  double no = ksv_amplified_accept(0.1, 60, 0.1, 0.9);
  CHECK(yes >= 0.99);
  CHECK(no <= 0.01);
}

TEST_CASE("ksv t=1 leaves acceptance unchanged") {
  auto mh = mf_convert(single_z(), -1, 1, 8, 0);
  auto amp = ksv_amplify(mh, 1);
  for (uint64_t idx : {uint64_t(0), uint64_t(1)}) {
    auto s = basis_state(1, idx);
    CHECK(exact_energy(amp, s) ==
          doctest::Approx(exact_energy(mh, s)).epsilon(1e-12));
  }
}

TEST_CASE("ksv all-accepting blocks accept overall") {
  MeasurementHamiltonian always;
  always.n = 1;
  always.seed_bits = 1;
  always.alpha = 0.1;
  always.beta = 0.9;
  always.sample_w = [](const BitVec&) { return PauliString::parse("Z"); };
  always.accept = [](const BitVec&, const BitVec&) { return true; };
  auto amp = ksv_amplify(always, 3);
  BitVec seed = BitVec::zeros(3);
  BitVec outcome = BitVec::zeros(3);
  CHECK(amp.accept(seed, outcome));
}

TEST_CASE("ksv amplified gap is non-decreasing over a doubling schedule") {
  // threshold rounding makes odd t steps non-monotone; doubling avoids it
  double prev_gap = -1;
  for (int t : {1, 2, 4, 8, 16, 32, 64}) {
    double gap = ksv_amplified_accept(0.85, t, 0.15, 0.85) -
                 ksv_amplified_accept(0.15, t, 0.15, 0.85);
    CHECK(gap >= prev_gap - 1e-12);
    prev_gap = gap;
  }
}

TEST_CASE("ksv literal threshold differs from the midpoint reading") {
  // the signed-sum form mixes scales and accepts far more generously
  double mid = ksv_amplified_accept(0.5, 40, 0.1, 0.9);
  double lit = ksv_amplified_accept(0.5, 40, 0.1, 0.9, true);
  CHECK(lit > mid);
}

TEST_CASE("ksv exact product terms match seed-space enumeration") {
  auto mh = mf_convert(single_z(), -1, 1, 2, 0);  // 4-seed toy
  auto amp = ksv_amplify(mh, 2);
  REQUIRE(!amp.exact_terms.empty());
  auto s = tensor(basis_state(1, 1), basis_state(1, 0));
  double via_terms = exact_energy(amp, s);
  MeasurementHamiltonian no_terms = amp;
  no_terms.exact_terms.clear();
  double via_seeds = exact_energy(no_terms, s);
  CHECK(via_terms == doctest::Approx(via_seeds).epsilon(1e-12));
}

TEST_CASE("prg expansion is deterministic and avalanching") {
  auto prg = hash_prg(kHash, 32, 512);
  Rng rng(31);
  BitVec seed = BitVec::random(32, rng);
  CHECK(prg.expand(seed) == prg.expand(seed));
  double flipped = 0;
  int pairs = 100;
  for (int i = 0; i < pairs; ++i) {
    BitVec s1 = BitVec::random(32, rng);
    BitVec s2 = s1;
    int pos = int(rng.next_below(32));
    s2.set(pos, 1 - s2.get(pos));
    BitVec o1 = prg.expand(s1), o2 = prg.expand(s2);
    int diff = 0;
    for (int b = 0; b < 512; ++b) diff += o1.get(b) != o2.get(b);
    flipped += double(diff) / 512.0;
  }
  CHECK(flipped / pairs > 0.40);
}

TEST_CASE("prg output length equals seed length still works") {
  auto prg = hash_prg(kHash, 64, 64);
  Rng rng(32);
  BitVec seed = BitVec::random(64, rng);
  CHECK(prg.expand(seed).bits == 64);
  CHECK(prg.expand(seed) == prg.expand(seed));
}

TEST_CASE("identity prg subsampling is the identity on the sampler") {
  auto mh = mf_convert(single_z(), -1, 1, 6, 2);
  auto sub = prg_subsample(mh, identity_prg(mh.seed_bits));
  Rng rng(33);
  for (int i = 0; i < 50; ++i) {
    BitVec seed = BitVec::random(mh.seed_bits, rng);
    CHECK(sub.sample_w(seed).str() == mh.sample_w(seed).str());
    BitVec u = BitVec::random(1, rng);
    CHECK(sub.accept(seed, u) == mh.accept(seed, u));
  }
}

TEST_CASE("constant prg collapses the sampler to one draw") {
  auto mh = mf_convert(single_z(), -1, 1, 6, 2);
  BitVec fixed = BitVec::from_u64(5, mh.seed_bits);
  auto sub = prg_subsample(mh, constant_prg(8, fixed));
  sub.exact_terms.clear();
  sub.seed_bits = 4;  // small enumeration; every seed expands identically
  auto s = basis_state(1, 1);
  double expect = 1.0 - (mh.accept(fixed, BitVec::from_u64(1, 1)) ? 1.0 : 0.0);
  CHECK(exact_energy(sub, s) == doctest::Approx(expect));
}

TEST_CASE("prg subsampling preserves ground energy on a toy instance") {
  Rng rng(34);
  XZHamiltonian h;
  h.n = 2;
  h.terms.push_back({-1.0, {0, 1}, {Letter::Z, Letter::Z}});
  h.terms.push_back({-0.5, {0}, {Letter::X}});
  h.terms.push_back({+0.5, {1}, {Letter::Z}});
  auto mh = mf_convert(h, -2, 2, 6, 2);  // 8 seed bits, enumerable
  MeasurementHamiltonian seeds_only = mh;
  seeds_only.exact_terms.clear();
  double before = ground_energy(dense_hamiltonian(seeds_only));
  auto sub = prg_subsample(mh, hash_prg(kHash, 16, mh.seed_bits));
  double after = ground_energy(dense_hamiltonian(sub));
  CHECK(std::abs(before - after) <= 0.05);
}

TEST_CASE("prg output length shortfall is an error") {
  auto mh = mf_convert(single_z(), -1, 1);
  CHECK_THROWS_AS(prg_subsample(mh, hash_prg(kHash, 16, mh.seed_bits - 1)),
                  Error);
}

TEST_CASE("dprime marginals: ones keep w, zeros blank it") {
  auto mh = mf_convert(single_z(), -1, 1, 4, 0);
  BitVec seed = BitVec::zeros(mh.seed_bits + 1);
  CHECK(dprime_sample(mh, seed).str() == "I");
  seed.set(mh.seed_bits, 1);
  CHECK(dprime_sample(mh, seed).str() == "Z");
  CHECK_THROWS_AS(dprime_sample(mh, BitVec::zeros(mh.seed_bits)), Error);
}

TEST_CASE("dprime per-position marginal is half identity, half w") {
  XZHamiltonian h;
  h.n = 3;
  h.terms.push_back({1.0, {0, 2}, {Letter::X, Letter::Z}});
  auto mh = mf_convert(h, -1, 1, 4, 0);
  Rng rng(35);
  int keep[3] = {0, 0, 0};
  int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    BitVec seed = BitVec::random(mh.seed_bits + 3, rng);
    PauliString w = dprime_sample(mh, seed);
    for (int q = 0; q < 3; ++q)
      if (w[q] != Letter::I) ++keep[q];
  }
  // positions 0 and 2 carry non-identity letters half the time; 5 sigma
  double sigma = std::sqrt(0.25 * draws);
  CHECK(std::abs(keep[0] - draws / 2.0) < 5 * sigma);
  CHECK(std::abs(keep[2] - draws / 2.0) < 5 * sigma);
  CHECK(keep[1] == 0);
}

TEST_CASE("yes instances with a tight declared promise accept within alpha") {
  Rng rng(37);
  for (int rep = 0; rep < 5; ++rep) {
    auto h = random_xz(3, 4, rng);
    double c = 0;
    for (auto& t : h.terms) c += std::abs(t.coeff);
    if (c == 0) continue;
    double gs = ground_energy(h.dense());
    auto mh = mf_convert(h, gs, c, 6, 0);
    auto state = QuantumState::from_amplitudes(
        3, ground_state(dense_hamiltonian(mh)));
    // quantization moves the declared alpha by at most m * 2^-6
    CHECK(exact_energy(mh, state) <= mh.alpha + h.terms.size() / 64.0 + 1e-9);
  }
  // exact case: a single dyadic-weight term hits alpha on the nose
  auto mh = mf_convert(single_z(), -1.0, 1.0);
  CHECK(exact_energy(mh, basis_state(1, 1)) <= mh.alpha + 1e-9);
}

TEST_CASE("recipe reconstruction matches the original pipeline") {
  XZHamiltonian h;
  h.n = 2;
  h.terms.push_back({-1.0, {0, 1}, {Letter::Z, Letter::Z}});
  h.terms.push_back({0.25, {1}, {Letter::X}});
  auto mh = prg_subsample(ksv_amplify(mf_convert(h, -1.25, 1.25, 6, 2), 2),
                          hash_prg(kHash, 12, 16));
  auto back = mh_from_recipe(mh.recipe, kHash);
  CHECK(back.n == mh.n);
  CHECK(back.seed_bits == mh.seed_bits);
  Rng rng(36);
  for (int i = 0; i < 30; ++i) {
    BitVec seed = BitVec::random(mh.seed_bits, rng);
    CHECK(back.sample_w(seed).str() == mh.sample_w(seed).str());
    BitVec u = BitVec::random(mh.n, rng);
    CHECK(back.accept(seed, u) == mh.accept(seed, u));
  }
}
