#include "qarg/simulator.hpp"

#include <nlohmann/json.hpp>

namespace qarg {

namespace {

// Amplitude bit for state qubit q (qubit 0 = most significant bit).
inline uint64_t qbit(const QuantumState& s, int q) {
  require(q >= 0 && q < s.qubits, "qubit index out of range");
  return uint64_t{1} << (s.qubits - 1 - q);
}

constexpr double kBranchPrune = 1e-24;

}  // namespace

QuantumState QuantumState::zero(int qubits) {
  require(qubits >= 1 && qubits <= kStateQubitCap, "state cap exceeded");
  QuantumState s;
  s.qubits = qubits;
  s.amp = VectorC::Zero(dim_for_qubits(qubits));
  s.amp(0) = 1.0;
  return s;
}

QuantumState QuantumState::from_amplitudes(int qubits, VectorC a) {
  require(a.size() == dim_for_qubits(qubits), "amplitude length mismatch");
  QuantumState s;
  s.qubits = qubits;
  s.amp = std::move(a);
  double n2 = s.norm2();
  require(n2 > 0 && n2 <= 1.0 + 1e-9, "state norm out of (0, 1]");
  return s;
}

QuantumState QuantumState::renormalized() const {
  QuantumState s = *this;
  double n = std::sqrt(norm2());
  require(n > 0, "renormalize: zero state");
  s.amp /= n;
  return s;
}

QuantumState prepare_epr(int k) {
  require(k >= 1 && 2 * k <= kStateQubitCap, "prepare_epr: cap exceeded");
  QuantumState s;
  s.qubits = 2 * k;
  Eigen::Index dim = dim_for_qubits(2 * k);
  s.amp = VectorC::Zero(dim);
  double w = std::pow(0.5, double(k) / 2.0);
  // Alice qubit i pairs with Bob qubit k+i; equal bit patterns sit at
  // index = x * 2^k + x.
  for (uint64_t x = 0; x < (uint64_t{1} << k); ++x)
    s.amp(Eigen::Index((x << k) | x)) = w;
  return s;
}

QuantumState tensor(const QuantumState& a, const QuantumState& b) {
  require(a.qubits + b.qubits <= kStateQubitCap, "tensor: cap exceeded");
  QuantumState s;
  s.qubits = a.qubits + b.qubits;
  s.amp = VectorC::Zero(dim_for_qubits(s.qubits));
  Eigen::Index db = dim_for_qubits(b.qubits);
  for (Eigen::Index i = 0; i < a.amp.size(); ++i) {
    if (a.amp(i) == Complex(0, 0)) continue;
    s.amp.segment(i * db, db) = a.amp(i) * b.amp;
  }
  return s;
}

void apply_single_qubit(QuantumState& s, int q, const MatrixC& gate) {
  require(gate.rows() == 2 && gate.cols() == 2, "gate must be 2x2");
  uint64_t bit = qbit(s, q);
  Eigen::Index dim = s.amp.size();
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (uint64_t(i) & bit) continue;
    Eigen::Index j = Eigen::Index(uint64_t(i) | bit);
    Complex a0 = s.amp(i), a1 = s.amp(j);
    s.amp(i) = gate(0, 0) * a0 + gate(0, 1) * a1;
    s.amp(j) = gate(1, 0) * a0 + gate(1, 1) * a1;
  }
}

void apply_hadamard(QuantumState& s, int q) {
  static const double r = 1.0 / std::sqrt(2.0);
  MatrixC h(2, 2);
  h << r, r, r, -r;
  apply_single_qubit(s, q, h);
}

void apply_cnot(QuantumState& s, int control, int target) {
  require(control != target, "cnot: overlapping indices");
  uint64_t cb = qbit(s, control), tb = qbit(s, target);
  Eigen::Index dim = s.amp.size();
  for (Eigen::Index i = 0; i < dim; ++i) {
    if ((uint64_t(i) & cb) && !(uint64_t(i) & tb))
      std::swap(s.amp(i), s.amp(Eigen::Index(uint64_t(i) | tb)));
  }
}

void apply_word(QuantumState& s, const PauliWord& p,
                const std::vector<int>& qubits) {
  require(int(qubits.size()) == p.n, "apply_word: arity mismatch");
  uint64_t xrev = 0, zrev = 0;
  for (int i = 0; i < p.n; ++i) {
    uint64_t bit = qbit(s, qubits[size_t(i)]);
    if ((p.xmask >> i) & 1) xrev |= bit;
    if ((p.zmask >> i) & 1) zrev |= bit;
  }
  Eigen::Index dim = s.amp.size();
  VectorC out = VectorC::Zero(dim);
  double ph = double(p.phase);
  // X(x) Z(z) |c> = (-1)^{z.c} |c ^ x>
  for (Eigen::Index c = 0; c < dim; ++c) {
    double sgn = parity64(uint64_t(c) & zrev) ? -ph : ph;
    out(Eigen::Index(uint64_t(c) ^ xrev)) = sgn * s.amp(c);
  }
  s.amp.swap(out);
}

std::array<QuantumState, 2> measure_word_branches(
    const QuantumState& s, const PauliWord& p,
    const std::vector<int>& qubits) {
  require(p.is_hermitian_word(), "measure_word: word is not an observable");
  QuantumState rotated = s;
  apply_word(rotated, p, qubits);
  std::array<QuantumState, 2> out;
  out[0].qubits = out[1].qubits = s.qubits;
  out[0].amp = (s.amp + rotated.amp) / 2.0;
  out[1].amp = (s.amp - rotated.amp) / 2.0;
  return out;
}

std::vector<std::pair<uint64_t, QuantumState>> measure_bases_branches(
    const QuantumState& s, const std::vector<int>& qubits,
    const PauliString& w) {
  require(int(qubits.size()) == w.size(), "measure_bases: arity mismatch");
  for (size_t i = 0; i < qubits.size(); ++i)
    for (size_t j = i + 1; j < qubits.size(); ++j)
      require(qubits[i] != qubits[j], "measure_bases: duplicate qubit");
  std::vector<std::pair<uint64_t, QuantumState>> branches;
  branches.emplace_back(0, s);
  for (size_t i = 0; i < qubits.size(); ++i) {
    if (w[int(i)] == Letter::I) continue;  // forced outcome 0
    PauliWord one{1, +1, w[int(i)] == Letter::X ? uint64_t{1} : 0,
                  w[int(i)] == Letter::Z ? uint64_t{1} : 0};
    std::vector<std::pair<uint64_t, QuantumState>> next;
    next.reserve(branches.size() * 2);
    for (auto& [u, st] : branches) {
      auto halves = measure_word_branches(st, one, {qubits[i]});
      for (int b = 0; b < 2; ++b) {
        if (halves[size_t(b)].norm2() < kBranchPrune) continue;
        next.emplace_back(u | (uint64_t(b) << i), std::move(halves[size_t(b)]));
      }
    }
    branches.swap(next);
  }
  return branches;
}

MeasurementOutcome measure_bases(const QuantumState& s,
                                 const std::vector<int>& qubits,
                                 const PauliString& w, Rng& rng) {
  auto branches = measure_bases_branches(s, qubits, w);
  double total = 0;
  for (auto& [u, st] : branches) total += st.norm2();
  MeasurementOutcome out;
  out.draw_index = rng.draws();
  double pick = rng.next_double() * total;
  double acc = 0;
  for (auto& [u, st] : branches) {
    acc += st.norm2();
    if (pick <= acc || &st == &branches.back().second) {
      out.bits = u;
      out.probability = st.norm2();
      out.branch = st.renormalized();
      return out;
    }
  }
  throw Error("measure_bases: unreachable");
}

QuantumState collapse(const QuantumState& s, int q, int bit) {
  require(s.qubits >= 2, "collapse: cannot drop last qubit");
  uint64_t b = qbit(s, q);
  QuantumState out;
  out.qubits = s.qubits - 1;
  out.amp = VectorC::Zero(dim_for_qubits(out.qubits));
  uint64_t low = b - 1;          // bits below q's bit
  for (Eigen::Index i = 0; i < out.amp.size(); ++i) {
    uint64_t hi = (uint64_t(i) & ~low) << 1;
    uint64_t idx = hi | (uint64_t(i) & low) | (bit ? b : 0);
    out.amp(i) = s.amp(Eigen::Index(idx));
  }
  return out;
}

std::vector<BellBranch> bell_measure_branches(const QuantumState& s, int q1,
                                              int q2) {
  require(q1 != q2, "bell_measure: overlapping indices");
  QuantumState rotated = s;
  apply_cnot(rotated, q1, q2);
  apply_hadamard(rotated, q1);
  std::vector<BellBranch> out;
  int hi = std::max(q1, q2), lo = std::min(q1, q2);
  for (int uz = 0; uz < 2; ++uz) {
    for (int ux = 0; ux < 2; ++ux) {
      int b1 = uz, b2 = ux;  // q1 measures uz, q2 measures ux
      QuantumState dropped =
          collapse(collapse(rotated, hi, hi == q1 ? b1 : b2), lo,
                   lo == q1 ? b1 : b2);
      if (dropped.norm2() < kBranchPrune) continue;
      out.push_back({ux, uz, std::move(dropped)});
    }
  }
  return out;
}

TeleportResult teleport(const QuantumState& s, int source, int alice_half,
                        Rng& rng) {
  auto branches = bell_measure_branches(s, source, alice_half);
  double total = 0;
  for (auto& b : branches) total += b.post.norm2();
  double pick = rng.next_double() * total;
  double acc = 0;
  for (auto& b : branches) {
    acc += b.post.norm2();
    if (pick <= acc || &b == &branches.back()) {
      TeleportResult r;
      r.ux = b.ux;
      r.uz = b.uz;
      r.probability = b.post.norm2();
      r.post = b.post.renormalized();
      return r;
    }
  }
  throw Error("teleport: unreachable");
}

QuantumState extract_pure_subsystem(const QuantumState& s,
                                    const std::vector<int>& keep) {
  int k = int(keep.size());
  require(k >= 1 && k <= s.qubits, "extract: bad subsystem");
  Eigen::Index dk = dim_for_qubits(k);
  int e = s.qubits - k;
  Eigen::Index de = dim_for_qubits(e);
  std::vector<int> env;
  for (int q = 0; q < s.qubits; ++q)
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) env.push_back(q);
  // rho_keep = sum_env |psi_env><psi_env|
  MatrixC rho = MatrixC::Zero(dk, dk);
  std::vector<VectorC> slices(size_t(de), VectorC::Zero(dk));
  for (Eigen::Index idx = 0; idx < s.amp.size(); ++idx) {
    uint64_t kv = 0, ev = 0;
    for (int j = 0; j < k; ++j)
      if (uint64_t(idx) & (uint64_t{1} << (s.qubits - 1 - keep[size_t(j)])))
        kv |= uint64_t{1} << (k - 1 - j);
    for (int j = 0; j < e; ++j)
      if (uint64_t(idx) & (uint64_t{1} << (s.qubits - 1 - env[size_t(j)])))
        ev |= uint64_t{1} << (e - 1 - j);
    slices[ev](Eigen::Index(kv)) = s.amp(idx);
  }
  for (auto& v : slices) rho += v * v.adjoint();
  double tr = rho.trace().real();
  require(tr > 0, "extract: zero weight");
  Eigen::SelfAdjointEigenSolver<MatrixC> es(rho);
  double top = es.eigenvalues()(dk - 1);
  require(top / tr > 1.0 - 1e-9, "extract: subsystem is not pure");
  QuantumState out;
  out.qubits = k;
  out.amp = es.eigenvectors().col(dk - 1);
  return out;
}

namespace {

double exact_accept_rec(const QuantumState& st,
                        const std::vector<ScriptStep>& script, size_t step,
                        std::vector<uint64_t>& outcomes,
                        const ScriptVerdict& verdict) {
  if (step == script.size())
    return verdict(outcomes) ? st.norm2() : 0.0;
  double acc = 0;
  if (const auto* m = std::get_if<MeasureStep>(&script[step])) {
    for (auto& [u, branch] : measure_bases_branches(st, m->qubits, m->bases)) {
      outcomes.push_back(u);
      acc += exact_accept_rec(branch, script, step + 1, outcomes, verdict);
      outcomes.pop_back();
    }
  } else {
    const auto& w = std::get<WordStep>(script[step]);
    auto halves = measure_word_branches(st, w.word, w.qubits);
    for (int b = 0; b < 2; ++b) {
      if (halves[size_t(b)].norm2() < kBranchPrune) continue;
      outcomes.push_back(uint64_t(b));
      acc += exact_accept_rec(halves[size_t(b)], script, step + 1, outcomes,
                              verdict);
      outcomes.pop_back();
    }
  }
  return acc;
}

}  // namespace

double exact_accept_prob(const QuantumState& initial,
                         const std::vector<ScriptStep>& script,
                         const ScriptVerdict& verdict) {
  std::vector<uint64_t> outcomes;
  return exact_accept_rec(initial, script, 0, outcomes, verdict);
}

double sampled_accept_prob(const QuantumState& initial,
                           const std::vector<ScriptStep>& script,
                           const ScriptVerdict& verdict, int trials,
                           Rng& rng) {
  int accepted = 0;
  for (int t = 0; t < trials; ++t) {
    QuantumState st = initial;
    std::vector<uint64_t> outcomes;
    for (const auto& step : script) {
      if (const auto* m = std::get_if<MeasureStep>(&step)) {
        auto o = measure_bases(st, m->qubits, m->bases, rng);
        outcomes.push_back(o.bits);
        st = o.branch;
      } else {
        const auto& w = std::get<WordStep>(step);
        auto halves = measure_word_branches(st, w.word, w.qubits);
        double p0 = halves[0].norm2() / st.norm2();
        int b = rng.next_double() < p0 ? 0 : 1;
        outcomes.push_back(uint64_t(b));
        st = halves[size_t(b)].renormalized();
      }
    }
    if (verdict(outcomes)) ++accepted;
  }
  return double(accepted) / double(trials);
}

std::string state_to_json(const QuantumState& s) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < s.amp.size(); ++i)
    j.push_back({i, s.amp(i).real(), s.amp(i).imag()});
  return j.dump();
}

}  // namespace qarg
