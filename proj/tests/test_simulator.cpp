#include <doctest.h>

#include "qarg/simulator.hpp"

using namespace qarg;

namespace {

QuantumState random_pure(int qubits, Rng& rng) {
  VectorC a(dim_for_qubits(qubits));
  for (Eigen::Index i = 0; i < a.size(); ++i)
    a(i) = Complex(rng.next_double() - 0.5, rng.next_double() - 0.5);
  a /= a.norm();
  return QuantumState::from_amplitudes(qubits, a);
}

}  // namespace

TEST_CASE("prepare_epr amplitudes") {
  auto s = prepare_epr(1);
  double r = 1.0 / std::sqrt(2.0);
  CHECK(s.amp(0).real() == doctest::Approx(r));
  CHECK(std::abs(s.amp(1)) == doctest::Approx(0));
  CHECK(std::abs(s.amp(2)) == doctest::Approx(0));
  CHECK(s.amp(3).real() == doctest::Approx(r));
}

TEST_CASE("EPR correlations in Z and X, exact branch norms") {
  auto s = prepare_epr(2);
  for (Letter basis : {Letter::Z, Letter::X}) {
    PauliString w;
    w.letters = {basis, basis};
    // measure pair (0, 2)
    auto branches = measure_bases_branches(s, {0, 2}, w);
    double equal_mass = 0, unequal_mass = 0;
    for (auto& [u, st] : branches) {
      bool eq = ((u & 1) != 0) == ((u & 2) != 0);
      (eq ? equal_mass : unequal_mass) += st.norm2();
    }
    CHECK(equal_mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(unequal_mass == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("norm conservation: branch probabilities sum to one") {
  Rng rng(5);
  auto s = random_pure(4, rng);
  auto branches =
      measure_bases_branches(s, {0, 1, 2, 3}, PauliString::parse("XZXZ"));
  double total = 0;
  for (auto& [u, st] : branches) total += st.norm2();
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("identity letters force outcome zero") {
  Rng rng(6);
  auto s = random_pure(2, rng);
  auto branches = measure_bases_branches(s, {0, 1}, PauliString::parse("IZ"));
  for (auto& [u, st] : branches) CHECK((u & 1) == 0);
}

TEST_CASE("measuring twice in the same basis repeats the outcome") {
  Rng rng(7);
  auto s = random_pure(3, rng);
  auto w = PauliString::parse("XZZ");
  auto first = measure_bases(s, {0, 1, 2}, w, rng);
  auto second = measure_bases(first.branch, {0, 1, 2}, w, rng);
  CHECK(first.bits == second.bits);
  CHECK(second.probability == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("simple fixed-state measurements") {
  auto zero = QuantumState::zero(1);
  Rng rng(8);
  auto o = measure_bases(zero, {0}, PauliString::parse("Z"), rng);
  CHECK(o.bits == 0);
  CHECK(o.probability == doctest::Approx(1.0));

  QuantumState plus;
  plus.qubits = 1;
  plus.amp = VectorC(2);
  plus.amp << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  auto branches = measure_bases_branches(plus, {0}, PauliString::parse("Z"));
  CHECK(branches.size() == 2);
  for (auto& [u, st] : branches)
    CHECK(st.norm2() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("teleportation: corrected state matches the source") {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    auto source = random_pure(1, rng);
    auto full = tensor(source, prepare_epr(1));  // qubits: src, alice, bob
    for (auto& br : bell_measure_branches(full, 0, 1)) {
      CHECK(br.post.norm2() == doctest::Approx(0.25).epsilon(1e-10));
      QuantumState bob = br.post.renormalized();
      // undo sigma_X^ux sigma_Z^uz
      PauliWord corr{1, +1, uint64_t(br.ux), uint64_t(br.uz)};
      QuantumState fixed = bob;
      apply_word(fixed, corr, {0});
      double fidelity = std::abs(
          (source.amp.adjoint() * fixed.amp)(0, 0));
      CHECK(fidelity >= 1.0 - 1e-9);
    }
  }
}

TEST_CASE("teleport of |0> and |+> gives deterministic corrected outcomes") {
  Rng rng(10);
  // |0>: corrected Z-measurement must give 0
  auto full = tensor(QuantumState::zero(1), prepare_epr(1));
  for (int trial = 0; trial < 20; ++trial) {
    auto r = teleport(full, 0, 1, rng);
    PauliWord corr{1, +1, uint64_t(r.ux), uint64_t(r.uz)};
    QuantumState fixed = r.post;
    apply_word(fixed, corr, {0});
    auto o = measure_bases(fixed, {0}, PauliString::parse("Z"), rng);
    CHECK(o.bits == 0);
  }
  // |+>: corrected X-measurement must give 0
  QuantumState plus;
  plus.qubits = 1;
  plus.amp = VectorC(2);
  plus.amp << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  full = tensor(plus, prepare_epr(1));
  for (int trial = 0; trial < 20; ++trial) {
    auto r = teleport(full, 0, 1, rng);
    PauliWord corr{1, +1, uint64_t(r.ux), uint64_t(r.uz)};
    QuantumState fixed = r.post;
    apply_word(fixed, corr, {0});
    auto o = measure_bases(fixed, {0}, PauliString::parse("X"), rng);
    CHECK(o.bits == 0);
  }
}

TEST_CASE("teleportation corrections pair ux with Z-basis checks") {
  // Bob holds X^ux Z^uz |phi>. Measuring in basis W and flipping the
  // answer by ux (when W = Z) or uz (when W = X) must reproduce the
  // source statistics; the opposite pairing must not, for a skewed state.
  Rng rng(11);
  VectorC a(2);
  a << std::sqrt(0.9), std::sqrt(0.1);
  auto source = QuantumState::from_amplitudes(1, a);
  auto full = tensor(source, prepare_epr(1));
  for (Letter basis : {Letter::Z, Letter::X}) {
    PauliString w;
    w.letters = {basis};
    // direct statistics
    double direct_p0 = 0;
    for (auto& [u, st] : measure_bases_branches(source, {0}, w))
      if (u == 0) direct_p0 += st.norm2();
    double paper_p0 = 0, swapped_p0 = 0;
    for (auto& br : bell_measure_branches(full, 0, 1)) {
      for (auto& [v, st] : measure_bases_branches(br.post.renormalized(),
                                                  {0}, w)) {
        int paper = int(v) ^ (basis == Letter::Z ? br.ux : br.uz);
        int swapped = int(v) ^ (basis == Letter::Z ? br.uz : br.ux);
        if (paper == 0) paper_p0 += 0.25 * st.norm2();
        if (swapped == 0) swapped_p0 += 0.25 * st.norm2();
      }
    }
    CHECK(paper_p0 == doctest::Approx(direct_p0).epsilon(1e-9));
    CHECK(std::abs(swapped_p0 - direct_p0) > 0.05);
  }
}

TEST_CASE("collapse drops the right qubit") {
  // |10> on qubits (0,1): collapse qubit 0 onto 1 keeps |0> on qubit 1
  QuantumState s;
  s.qubits = 2;
  s.amp = VectorC::Zero(4);
  s.amp(2) = 1.0;  // index 10
  auto t = collapse(s, 0, 1);
  CHECK(t.qubits == 1);
  CHECK(std::abs(t.amp(0) - Complex(1, 0)) < 1e-15);
  auto z = collapse(s, 0, 0);
  CHECK(z.norm2() == doctest::Approx(0.0));
}

TEST_CASE("extract_pure_subsystem recovers a tensor factor") {
  Rng rng(12);
  auto a = random_pure(2, rng);
  auto b = random_pure(1, rng);
  auto joint = tensor(a, b);
  auto got = extract_pure_subsystem(joint, {0, 1});
  double overlap = std::abs((got.amp.adjoint() * a.amp)(0, 0));
  CHECK(overlap == doctest::Approx(1.0).epsilon(1e-9));
  // entangled subsystem is rejected
  auto epr = prepare_epr(1);
  CHECK_THROWS_AS(extract_pure_subsystem(epr, {0}), Error);
}

TEST_CASE("exact_accept_prob on trivial scripts") {
  auto s = prepare_epr(1);
  std::vector<ScriptStep> script{
      MeasureStep{{0, 1}, PauliString::parse("ZZ")}};
  CHECK(exact_accept_prob(s, script, [](const auto&) { return true; }) ==
        doctest::Approx(1.0));
  // EPR halves agree in Z
  auto agree = [](const std::vector<uint64_t>& o) {
    return ((o[0] & 1) != 0) == ((o[0] & 2) != 0);
  };
  CHECK(exact_accept_prob(s, script, agree) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exact and sampled acceptance agree within 5 sigma") {
  Rng rng(13);
  auto s = random_pure(3, rng);
  std::vector<ScriptStep> script{
      MeasureStep{{0, 1, 2}, PauliString::parse("XZX")}};
  auto verdict = [](const std::vector<uint64_t>& o) {
    return parity64(o[0]) == 0;
  };
  double exact = exact_accept_prob(s, script, verdict);
  int trials = 20000;
  double sampled = sampled_accept_prob(s, script, verdict, trials, rng);
  double sigma = std::sqrt(exact * (1 - exact) / trials) + 1e-9;
  CHECK(std::abs(sampled - exact) < 5 * sigma);
}

TEST_CASE("word measurement branches are projective") {
  Rng rng(14);
  auto s = random_pure(3, rng);
  PauliWord obs{3, +1, 0b011, 0b011};
  REQUIRE(obs.is_hermitian_word());
  auto halves = measure_word_branches(s, obs, {0, 1, 2});
  CHECK(halves[0].norm2() + halves[1].norm2() ==
        doctest::Approx(1.0).epsilon(1e-10));
  auto again = measure_word_branches(halves[0], obs, {0, 1, 2});
  CHECK(again[0].norm2() == doctest::Approx(halves[0].norm2()).epsilon(1e-10));
  CHECK(again[1].norm2() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("duplicate qubit indices are rejected") {
  auto s = prepare_epr(1);
  CHECK_THROWS_AS(
      measure_bases_branches(s, {0, 0}, PauliString::parse("ZZ")), Error);
}

TEST_CASE("state dump lists every amplitude") {
  auto s = prepare_epr(1);
  auto json = state_to_json(s);
  CHECK(json.find("0.7071") != std::string::npos);
  CHECK(json.front() == '[');
}
