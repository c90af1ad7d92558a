#include "qarg/games.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qarg {

namespace {

constexpr double kPrune = 1e-24;

// Register indices; `offset` is n when the witness register is present,
// 0 for the pairs-only layout used by witness-free exact evaluation.
struct Idx {
  int n = 0;
  int offset = 0;

  static Idx of(int n, const QuantumState& st) {
    if (st.qubits == 3 * n + 2) return {n, n};
    if (st.qubits == 2 * n + 2) return {n, 0};
    throw Error("games: unexpected register layout");
  }
  int witness(int i) const {
    require(offset == n, "games: no witness register");
    return i;
  }
  int alice_grid() const { return offset; }
  int alice_mask(int i) const { return offset + 1 + i; }
  int bob_grid() const { return offset + n + 1; }
  int bob_mask(int i) const { return offset + n + 2 + i; }
  std::vector<int> alice_mask_all() const {
    std::vector<int> v;
    for (int i = 0; i < n; ++i) v.push_back(alice_mask(i));
    return v;
  }
  std::vector<int> bob_mask_all() const {
    std::vector<int> v;
    for (int i = 0; i < n; ++i) v.push_back(bob_mask(i));
    return v;
  }
};

PauliWord z_word(uint64_t a, int n) { return {n, +1, 0, a}; }
PauliWord x_word(uint64_t b, int n) { return {n, +1, b, 0}; }

uint64_t mask_bits(const BitVec& v) { return v.to_u64(); }

int parity_masked(uint64_t v, uint64_t mask) { return parity64(v & mask); }

// Seed-indexed view of the sampler: exact weights when available,
// otherwise full seed enumeration.
struct WeightedDraw {
  double weight = 0;
  PauliString w;
  std::function<bool(const BitVec&)> accept;
  BitVec seed;  // a representative seed mapping to this draw (seed mode)
};

std::vector<WeightedDraw> enumerate_draws(const MeasurementHamiltonian& mh,
                                          int max_seed_bits = 14) {
  std::vector<WeightedDraw> out;
  if (!mh.exact_terms.empty()) {
    for (const auto& t : mh.exact_terms)
      out.push_back({t.weight, t.w, t.accept, BitVec::zeros(mh.seed_bits)});
    return out;
  }
  require(mh.seed_bits <= max_seed_bits,
          "games: seed space too large for exact enumeration");
  uint64_t count = uint64_t{1} << mh.seed_bits;
  for (uint64_t s = 0; s < count; ++s) {
    BitVec seed = BitVec::from_u64(s, mh.seed_bits);
    out.push_back({1.0 / double(count), mh.sample_w(seed),
                   [&mh, seed](const BitVec& u) { return mh.accept(seed, u); },
                   seed});
  }
  return out;
}

// distinct (a, b) mask pairs of the braiding question distribution,
// weighted by index multiplicity
std::map<std::pair<uint64_t, uint64_t>, double> mask_pair_weights(
    const BiasedSet& S) {
  std::map<std::pair<uint64_t, uint64_t>, double> w;
  double unit = 1.0 / (double(S.size()) * double(S.size()));
  for (uint64_t a : S.members)
    for (uint64_t b : S.members) w[{a, b}] += unit;
  return w;
}

}  // namespace

// ------------------------------------------------------------ magic square

PauliWord magic_square_word(int cell, uint64_t a, uint64_t b, int n) {
  require(cell >= 1 && cell <= 9, "magic square: cell out of range");
  int m = n + 1;
  uint64_t am = a << 1, bm = b << 1;  // masked block starts at letter 1
  switch (cell) {
    case 1: return {m, +1, 0, 1};
    case 2: return {m, +1, 0, am};
    case 3: return {m, +1, 0, 1 | am};
    case 4: return {m, +1, bm, 0};
    case 5: return {m, +1, 1, 0};
    case 6: return {m, +1, 1 | bm, 0};
    case 7: return {m, -1, bm, 1};
    case 8: return {m, -1, 1, am};
    // -sigma_Z sigma_X (x) Z(a)X(b), rewritten in X-before-Z normal form
    case 9: return {m, -1, 1 | bm, 1 | am};
  }
  return {};
}

std::array<int, 3> ms_line_cells(int line) {
  require(line >= 0 && line < 6, "magic square: bad line");
  if (line < 3) return {3 * line + 1, 3 * line + 2, 3 * line + 3};
  int c = line - 3;
  return {c + 1, c + 4, c + 7};
}

int ms_line_parity(int line) { return line < 3 ? 0 : 1; }

bool ms_is_line(int i1, int i2, int i3) {
  for (int line = 0; line < 6; ++line) {
    auto c = ms_line_cells(line);
    if (c[0] == i1 && c[1] == i2 && c[2] == i3) return true;
  }
  return false;
}

namespace {

int ms_line_of(int i1, int i2, int i3) {
  for (int line = 0; line < 6; ++line) {
    auto c = ms_line_cells(line);
    if (c[0] == i1 && c[1] == i2 && c[2] == i3) return line;
  }
  throw Error("magic square: cells do not form a row or column");
}

}  // namespace

MagicSquareOracle magic_square_classical_oracle() {
  // rows for one player, columns for the other; every deterministic
  // assignment of three bits per line
  MagicSquareOracle best;
  for (int amask = 0; amask < (1 << 9); ++amask) {
    for (int bmask = 0; bmask < (1 << 9); ++bmask) {
      int wins = 0;
      for (int r = 0; r < 3; ++r) {
        int arow = (amask >> (3 * r)) & 7;
        if (parity64(uint64_t(arow))) continue;  // row constraint
        for (int c = 0; c < 3; ++c) {
          int bcol = (bmask >> (3 * c)) & 7;
          if (!parity64(uint64_t(bcol))) continue;  // column constraint
          int abit = (arow >> c) & 1;
          int bbit = (bcol >> r) & 1;
          if (abit == bbit) ++wins;
        }
      }
      if (wins > best.best_wins) best.best_wins = wins;
    }
  }
  return best;
}

// -------------------------------------------------------------- predicates

namespace {

bool verify_com_masks(uint64_t a, uint64_t b, int ua, int ub, Basis bobW,
                      uint64_t v) {
  if (bobW == Basis::Z) return parity_masked(v, a) == ua;
  return parity_masked(v, b) == ub;
}

bool verify_acom_masks(uint64_t a, uint64_t b, const std::array<int, 3>& cells,
                       int line, const BitVec& aliceBits, const Question& bq,
                       const BitVec& bobBits) {
  require(aliceBits.bits == 3, "anticommutation: alice arity");
  int u[3] = {aliceBits.get(0), aliceBits.get(1), aliceBits.get(2)};
  if ((u[0] ^ u[1] ^ u[2]) != ms_line_parity(line)) return false;
  if (const auto* pb = std::get_if<PureBasisQ>(&bq)) {
    int j = pb->w == Basis::Z ? 2 : 4;
    int k = -1;
    for (int i = 0; i < 3; ++i)
      if (cells[size_t(i)] == j) k = i;
    require(k >= 0, "anticommutation: cell j not on alice's line");
    uint64_t mask = pb->w == Basis::Z ? a : b;
    return parity_masked(mask_bits(bobBits), mask) == u[k];
  }
  const auto& mb = std::get<MsBobQ>(bq);
  int k = -1;
  for (int i = 0; i < 3; ++i)
    if (cells[size_t(i)] == mb.j) k = i;
  require(k >= 0, "anticommutation: cell j not on alice's line");
  require(bobBits.bits == 1, "anticommutation: bob arity");
  return bobBits.get(0) == u[k];
}

BitVec ham_corrected(const PauliString& w, const BitVec& v, const BitVec& ux,
                     const BitVec& uz) {
  int n = w.size();
  BitVec s = BitVec::zeros(n);
  for (int i = 0; i < n; ++i) {
    if (w[i] == Letter::I) continue;  // forced to 0
    int bit = v.get(i);
    if (w[i] == Letter::Z) bit ^= ux.get(i);
    if (w[i] == Letter::X) bit ^= uz.get(i);
    s.set(i, bit);
  }
  return s;
}

}  // namespace

bool verify_commutation(const BiasedSet& S, uint32_t ra, uint32_t rb, int ua,
                        int ub, Basis bobW, uint64_t v) {
  return verify_com_masks(S.member(ra), S.member(rb), ua, ub, bobW, v);
}

bool verify_anticommutation(const BiasedSet& S, const MsAliceQ& aq,
                            const BitVec& aliceBits, const Question& bq,
                            const BitVec& bobBits) {
  int line = ms_line_of(aq.i1, aq.i2, aq.i3);
  return verify_acom_masks(S.member(aq.ra), S.member(aq.rb),
                           {aq.i1, aq.i2, aq.i3}, line, aliceBits, bq,
                           bobBits);
}

bool verdict_of(const BiasedSet& S, const MeasurementHamiltonian& mh,
                const QuestionPair& qp, const Answer& alice,
                const Answer& bob) {
  if (qp.test_id == "commutation") {
    const auto& aq = std::get<ComQ>(qp.alice);
    uint64_t a = S.member(aq.ra), b = S.member(aq.rb);
    if (parity64(a & b) != 0) return true;  // wrong-parity draws auto-accept
    require(alice.bits.bits == 2, "commutation: alice arity");
    const auto& bq = std::get<PureBasisQ>(qp.bob);
    return verify_com_masks(a, b, alice.bits.get(0), alice.bits.get(1), bq.w,
                            mask_bits(bob.bits));
  }
  if (qp.test_id == "anticommutation") {
    const auto& aq = std::get<MsAliceQ>(qp.alice);
    uint64_t a = S.member(aq.ra), b = S.member(aq.rb);
    if (parity64(a & b) != 1) return true;
    return verify_anticommutation(S, aq, alice.bits, qp.bob, bob.bits);
  }
  if (qp.test_id == "mixed") {
    const auto& aq = std::get<PureBasisQ>(qp.alice);
    if (const auto* pb = std::get_if<PureBasisQ>(&qp.bob)) {
      require(pb->w == aq.w, "mixed: basis mismatch in questions");
      return alice.bits == bob.bits;
    }
    const auto& mq = std::get<MixedQ>(qp.bob);
    PauliString w = mh.sample_w(mq.seed);
    for (int i = 0; i < w.size(); ++i)
      if (w[i] == basis_letter(aq.w) && alice.bits.get(i) != bob.bits.get(i))
        return false;
    return true;
  }
  if (qp.test_id == "hamiltonian") {
    const auto& mq = std::get<MixedQ>(qp.bob);
    PauliString w = mh.sample_w(mq.seed);
    int n = w.size();
    require(alice.bits.bits == 2 * n, "hamiltonian: alice arity");
    BitVec ux = alice.bits.slice(0, n), uz = alice.bits.slice(n, n);
    BitVec s = ham_corrected(w, bob.bits, ux, uz);
    return mh.accept(mq.seed, s);
  }
  throw Error("verdict_of: unknown test id " + qp.test_id);
}

// ---------------------------------------------------------------- sampling

QuestionPair sample_braiding_questions(const BiasedSet& S, Rng& rng,
                                       bool strict) {
  uint32_t ra = uint32_t(rng.next_below(uint64_t(S.size())));
  uint32_t rb = uint32_t(rng.next_below(uint64_t(S.size())));
  int want;
  if (strict) {
    want = parity64(S.member(ra) & S.member(rb));
  } else {
    want = rng.next_bit() ? 1 : 0;
  }
  QuestionPair qp;
  if (want == 0) {
    qp.test_id = "commutation";
    qp.alice = ComQ{ra, rb};
    qp.bob = PureBasisQ{rng.next_bit() ? Basis::X : Basis::Z};
  } else {
    qp.test_id = "anticommutation";
    int j = 1 + int(rng.next_below(9));
    int row = (j - 1) / 3, col = (j - 1) % 3;
    int line = rng.next_bit() ? (3 + col) : row;
    auto cells = ms_line_cells(line);
    qp.alice = MsAliceQ{ra, rb, cells[0], cells[1], cells[2]};
    if (j == 2)
      qp.bob = PureBasisQ{Basis::Z};
    else if (j == 4)
      qp.bob = PureBasisQ{Basis::X};
    else
      qp.bob = MsBobQ{ra, rb, j};
  }
  return qp;
}

QuestionPair sample_mixed_questions(const MeasurementHamiltonian& mh,
                                    Rng& rng) {
  QuestionPair qp;
  qp.test_id = "mixed";
  Basis w = rng.next_bit() ? Basis::X : Basis::Z;
  qp.alice = PureBasisQ{w};
  if (rng.next_bit() == 0) {
    qp.bob = PureBasisQ{w};
  } else {
    qp.bob = MixedQ{BitVec::random(mh.seed_bits, rng)};
  }
  return qp;
}

QuestionPair sample_hamiltonian_questions(const MeasurementHamiltonian& mh,
                                          Rng& rng) {
  QuestionPair qp;
  qp.test_id = "hamiltonian";
  qp.alice = TeleQ{};
  qp.bob = MixedQ{BitVec::random(mh.seed_bits, rng)};
  return qp;
}

QuestionPair sample_main_questions(const BiasedSet& S,
                                   const MeasurementHamiltonian& mh, Rng& rng,
                                   bool strict) {
  switch (rng.next_below(3)) {
    case 0: return sample_braiding_questions(S, rng, strict);
    case 1: return sample_mixed_questions(mh, rng);
    default: return sample_hamiltonian_questions(mh, rng);
  }
}

// -------------------------------------------------------------- honest play

HonestContext::HonestContext(QuantumState witness, MeasurementHamiltonian mh,
                             BiasedSet S)
    : n_(witness.qubits),
      witness_(std::move(witness)),
      mh_(std::move(mh)),
      S_(std::move(S)) {
  require(mh_.n == n_, "honest strategy: witness does not match sampler");
}

QuantumState HonestContext::initial_state() const {
  return tensor(witness_, prepare_epr(n_ + 1));
}

std::vector<std::pair<Answer, QuantumState>> HonestContext::alice_branches(
    const Question& q, const QuantumState& state) const {
  Idx ix = Idx::of(n_, state);
  std::vector<std::pair<Answer, QuantumState>> out;
  if (const auto* cq = std::get_if<ComQ>(&q)) {
    uint64_t a = S_.member(cq->ra), b = S_.member(cq->rb);
    auto za = measure_word_branches(state, z_word(a, n_), ix.alice_mask_all());
    for (int ua = 0; ua < 2; ++ua) {
      if (za[size_t(ua)].norm2() < kPrune) continue;
      auto xb = measure_word_branches(za[size_t(ua)], x_word(b, n_),
                                      ix.alice_mask_all());
      for (int ub = 0; ub < 2; ++ub) {
        if (xb[size_t(ub)].norm2() < kPrune) continue;
        BitVec bits = BitVec::zeros(2);
        bits.set(0, ua);
        bits.set(1, ub);
        out.push_back({Answer{bits}, std::move(xb[size_t(ub)])});
      }
    }
    return out;
  }
  if (const auto* mq = std::get_if<MsAliceQ>(&q)) {
    uint64_t a = S_.member(mq->ra), b = S_.member(mq->rb);
    std::vector<int> qubits{ix.alice_grid()};
    for (int i = 0; i < n_; ++i) qubits.push_back(ix.alice_mask(i));
    int cells[3] = {mq->i1, mq->i2, mq->i3};
    out.push_back({Answer{BitVec::zeros(3)}, state});
    for (int k = 0; k < 3; ++k) {
      PauliWord obs = magic_square_word(cells[k], a, b, n_);
      // cell 9 is only an observable when a.b is odd; mismatched draws are
      // auto-accepted by the verifier, so answer 0 without measuring
      if (!obs.is_hermitian_word()) continue;
      std::vector<std::pair<Answer, QuantumState>> next;
      for (auto& [ans, st] : out) {
        auto halves = measure_word_branches(st, obs, qubits);
        for (int u = 0; u < 2; ++u) {
          if (halves[size_t(u)].norm2() < kPrune) continue;
          Answer na = ans;
          na.bits.set(k, u);
          next.push_back({na, std::move(halves[size_t(u)])});
        }
      }
      out.swap(next);
    }
    return out;
  }
  if (const auto* pq = std::get_if<PureBasisQ>(&q)) {
    auto w = PauliString::uniform(basis_letter(pq->w), n_);
    for (auto& [u, st] : measure_bases_branches(state, ix.alice_mask_all(), w))
      out.push_back({Answer{BitVec::from_u64(u, n_)}, std::move(st)});
    return out;
  }
  if (const auto* xq = std::get_if<MixedQ>(&q)) {
    PauliString w = mh_.sample_w(xq->seed);
    for (auto& [u, st] : measure_bases_branches(state, ix.alice_mask_all(), w))
      out.push_back({Answer{BitVec::from_u64(u, n_)}, std::move(st)});
    return out;
  }
  if (std::get_if<TeleQ>(&q)) {
    require(n_ <= 3, "tele branch enumeration capped at n = 3");
    struct Partial {
      BitVec ux, uz;
      QuantumState st;
    };
    std::vector<Partial> acc{{BitVec::zeros(n_), BitVec::zeros(n_), state}};
    for (int i = 0; i < n_; ++i) {
      std::vector<Partial> next;
      for (auto& p : acc) {
        QuantumState rotated = p.st;
        apply_cnot(rotated, ix.witness(i), ix.alice_mask(i));
        apply_hadamard(rotated, ix.witness(i));
        auto branches = measure_bases_branches(
            rotated, {ix.witness(i), ix.alice_mask(i)},
            PauliString::parse("ZZ"));
        for (auto& [bits, st] : branches) {
          Partial np{p.ux, p.uz, std::move(st)};
          np.uz.set(i, int(bits & 1));
          np.ux.set(i, int((bits >> 1) & 1));
          next.push_back(std::move(np));
        }
      }
      acc.swap(next);
    }
    for (auto& p : acc) {
      BitVec bits = p.ux;
      bits.append(p.uz);
      out.push_back({Answer{bits}, std::move(p.st)});
    }
    return out;
  }
  throw Error("honest alice: unsupported question");
}

std::vector<std::pair<Answer, QuantumState>> HonestContext::bob_branches(
    const Question& q, const QuantumState& state) const {
  Idx ix = Idx::of(n_, state);
  std::vector<std::pair<Answer, QuantumState>> out;
  if (const auto* pq = std::get_if<PureBasisQ>(&q)) {
    auto w = PauliString::uniform(basis_letter(pq->w), n_);
    for (auto& [u, st] : measure_bases_branches(state, ix.bob_mask_all(), w))
      out.push_back({Answer{BitVec::from_u64(u, n_)}, std::move(st)});
    return out;
  }
  if (const auto* mq = std::get_if<MsBobQ>(&q)) {
    uint64_t a = S_.member(mq->ra), b = S_.member(mq->rb);
    std::vector<int> qubits{ix.bob_grid()};
    for (int i = 0; i < n_; ++i) qubits.push_back(ix.bob_mask(i));
    PauliWord obs = magic_square_word(mq->j, a, b, n_);
    if (!obs.is_hermitian_word()) {
      out.push_back({Answer{BitVec::zeros(1)}, state});
      return out;
    }
    auto halves = measure_word_branches(state, obs, qubits);
    for (int u = 0; u < 2; ++u) {
      if (halves[size_t(u)].norm2() < kPrune) continue;
      out.push_back({Answer{BitVec::from_u64(uint64_t(u), 1)},
                     std::move(halves[size_t(u)])});
    }
    return out;
  }
  if (const auto* xq = std::get_if<MixedQ>(&q)) {
    PauliString w = mh_.sample_w(xq->seed);
    for (auto& [u, st] : measure_bases_branches(state, ix.bob_mask_all(), w))
      out.push_back({Answer{BitVec::from_u64(u, n_)}, std::move(st)});
    return out;
  }
  throw Error("honest bob: unsupported question");
}

std::pair<Answer, QuantumState> HonestContext::respond_sampled(
    bool alice_side, const Question& q, const QuantumState& state,
    Rng& rng) const {
  // teleportation samples pair by pair to avoid the 4^n branch fan-out
  if (alice_side && std::get_if<TeleQ>(&q)) {
    Idx ix = Idx::of(n_, state);
    QuantumState st = state;
    BitVec ux = BitVec::zeros(n_), uz = BitVec::zeros(n_);
    for (int i = 0; i < n_; ++i) {
      apply_cnot(st, ix.witness(i), ix.alice_mask(i));
      apply_hadamard(st, ix.witness(i));
      auto o = measure_bases(st, {ix.witness(i), ix.alice_mask(i)},
                             PauliString::parse("ZZ"), rng);
      uz.set(i, int(o.bits & 1));
      ux.set(i, int((o.bits >> 1) & 1));
      st = o.branch;
    }
    BitVec bits = ux;
    bits.append(uz);
    return {Answer{bits}, st};
  }
  auto branches =
      alice_side ? alice_branches(q, state) : bob_branches(q, state);
  double total = 0;
  for (auto& [ans, st] : branches) total += st.norm2();
  double pick = rng.next_double() * total;
  double acc = 0;
  for (size_t i = 0; i < branches.size(); ++i) {
    acc += branches[i].second.norm2();
    if (pick <= acc || i + 1 == branches.size())
      return {branches[i].first, branches[i].second.renormalized()};
  }
  throw Error("respond_sampled: unreachable");
}

TwoProverStrategy honest_strategy(const QuantumState& witness,
                                  const MeasurementHamiltonian& mh,
                                  const BiasedSet& S) {
  auto ctx = std::make_shared<HonestContext>(witness, mh, S);
  TwoProverStrategy s;
  s.initial = ctx->initial_state();
  s.alice = [ctx](const Question& q, const QuantumState& st, Rng& rng) {
    return ctx->respond_sampled(true, q, st, rng);
  };
  s.bob = [ctx](const Question& q, const QuantumState& st, Rng& rng) {
    return ctx->respond_sampled(false, q, st, rng);
  };
  return s;
}

TwoProverStrategy classical_strategy(AnswerTable alice, AnswerTable bob) {
  TwoProverStrategy s;
  s.initial = QuantumState::zero(1);
  s.alice = [alice](const Question& q, const QuantumState& st, Rng&) {
    auto v = alice(q);
    require(v.has_value(), "classical strategy: table has no entry");
    return std::make_pair(Answer{*v}, st);
  };
  s.bob = [bob](const Question& q, const QuantumState& st, Rng&) {
    auto v = bob(q);
    require(v.has_value(), "classical strategy: table has no entry");
    return std::make_pair(Answer{*v}, st);
  };
  return s;
}

AnswerTable constant_zero_table(int n) {
  return [n](const Question& q) -> std::optional<BitVec> {
    if (std::get_if<ComQ>(&q)) return BitVec::zeros(2);
    if (std::get_if<MsAliceQ>(&q)) return BitVec::zeros(3);
    if (std::get_if<MsBobQ>(&q)) return BitVec::zeros(1);
    if (std::get_if<PureBasisQ>(&q)) return BitVec::zeros(n);
    if (std::get_if<MixedQ>(&q)) return BitVec::zeros(n);
    if (std::get_if<TeleQ>(&q)) return BitVec::zeros(2 * n);
    return std::nullopt;
  };
}

// -------------------------------------------------------------------- runs

GameTranscript run_questions(TwoProverStrategy& strategy, const BiasedSet& S,
                             const MeasurementHamiltonian& mh,
                             const QuestionPair& qp, Rng& rng) {
  GameTranscript t;
  t.test_id = qp.test_id;
  t.alice_q = qp.alice;
  t.bob_q = qp.bob;
  t.rng_seed = rng.seed();
  QuantumState st = strategy.initial;
  auto [aa, st1] = strategy.alice(qp.alice, st, rng);
  auto [bb, st2] = strategy.bob(qp.bob, st1, rng);
  t.alice_a = aa;
  t.bob_a = bb;
  t.verdict = verdict_of(S, mh, qp, aa, bb);
  t.rng_draws = rng.draws();
  return t;
}

GameTranscript run_pauli_braiding(TwoProverStrategy& strategy,
                                  const BiasedSet& S,
                                  const MeasurementHamiltonian& mh, Rng& rng,
                                  bool strict) {
  return run_questions(strategy, S, mh,
                       sample_braiding_questions(S, rng, strict), rng);
}

GameTranscript run_mixed_vs_pure(TwoProverStrategy& strategy,
                                 const BiasedSet& S,
                                 const MeasurementHamiltonian& mh, Rng& rng) {
  return run_questions(strategy, S, mh, sample_mixed_questions(mh, rng), rng);
}

GameTranscript run_hamiltonian_test(TwoProverStrategy& strategy,
                                    const BiasedSet& S,
                                    const MeasurementHamiltonian& mh,
                                    Rng& rng) {
  return run_questions(strategy, S, mh,
                       sample_hamiltonian_questions(mh, rng), rng);
}

GameTranscript run_main(TwoProverStrategy& strategy, const BiasedSet& S,
                        const MeasurementHamiltonian& mh, Rng& rng,
                        bool strict) {
  return run_questions(strategy, S, mh,
                       sample_main_questions(S, mh, rng, strict), rng);
}

// ---------------------------------------------------------- exact verdicts

namespace {

// acceptance of the honest commutation play for one (a, b) with a.b = 0,
// averaged over Bob's basis coin
double com_accept_masks(const HonestContext& ctx, const QuantumState& base,
                        uint64_t a, uint64_t b) {
  Idx ix = Idx::of(ctx.n(), base);
  int n = ctx.n();
  double total = 0;
  auto za = measure_word_branches(base, z_word(a, n), ix.alice_mask_all());
  for (int ua = 0; ua < 2; ++ua) {
    if (za[size_t(ua)].norm2() < kPrune) continue;
    auto xb =
        measure_word_branches(za[size_t(ua)], x_word(b, n), ix.alice_mask_all());
    for (int ub = 0; ub < 2; ++ub) {
      if (xb[size_t(ub)].norm2() < kPrune) continue;
      for (Basis W : {Basis::Z, Basis::X}) {
        auto wl = PauliString::uniform(basis_letter(W), n);
        for (auto& [v, st] :
             measure_bases_branches(xb[size_t(ub)], ix.bob_mask_all(), wl)) {
          if (verify_com_masks(a, b, ua, ub, W, v)) total += 0.5 * st.norm2();
        }
      }
    }
  }
  return total;
}

// acceptance of the honest anticommutation play for one (a, b) with
// a.b = 1, averaged over the cell and line draws
double acom_accept_masks(const HonestContext& ctx, const QuantumState& base,
                         uint64_t a, uint64_t b) {
  Idx ix = Idx::of(ctx.n(), base);
  int n = ctx.n();
  std::vector<int> aq{ix.alice_grid()};
  for (int i = 0; i < n; ++i) aq.push_back(ix.alice_mask(i));
  std::vector<int> bq{ix.bob_grid()};
  for (int i = 0; i < n; ++i) bq.push_back(ix.bob_mask(i));

  double total = 0;
  for (int j = 1; j <= 9; ++j) {
    int row = (j - 1) / 3, col = (j - 1) % 3;
    for (int line : {row, 3 + col}) {
      auto cells = ms_line_cells(line);
      // Alice's three commuting grid observables
      std::vector<std::pair<BitVec, QuantumState>> abr{
          {BitVec::zeros(3), base}};
      for (int k = 0; k < 3; ++k) {
        PauliWord obs = magic_square_word(cells[size_t(k)], a, b, n);
        std::vector<std::pair<BitVec, QuantumState>> next;
        for (auto& [bits, st] : abr) {
          auto halves = measure_word_branches(st, obs, aq);
          for (int u = 0; u < 2; ++u) {
            if (halves[size_t(u)].norm2() < kPrune) continue;
            BitVec nb = bits;
            nb.set(k, u);
            next.push_back({nb, std::move(halves[size_t(u)])});
          }
        }
        abr.swap(next);
      }
      Question bobq;
      if (j == 2)
        bobq = PureBasisQ{Basis::Z};
      else if (j == 4)
        bobq = PureBasisQ{Basis::X};
      else
        bobq = MsBobQ{0, 0, j};
      for (auto& [abits, ast] : abr) {
        if (j == 2 || j == 4) {
          auto wl = PauliString::uniform(j == 2 ? Letter::Z : Letter::X, n);
          for (auto& [v, st] :
               measure_bases_branches(ast, ix.bob_mask_all(), wl)) {
            if (verify_acom_masks(a, b, cells, line, abits, bobq,
                                  BitVec::from_u64(v, n)))
              total += st.norm2() / 18.0;
          }
        } else {
          PauliWord obs = magic_square_word(j, a, b, n);
          auto halves = measure_word_branches(ast, obs, bq);
          for (int v = 0; v < 2; ++v) {
            if (halves[size_t(v)].norm2() < kPrune) continue;
            if (verify_acom_masks(a, b, cells, line, abits, bobq,
                                  BitVec::from_u64(uint64_t(v), 1)))
              total += halves[size_t(v)].norm2() / 18.0;
          }
        }
      }
    }
  }
  return total;
}

}  // namespace

double exact_commutation_accept(const HonestContext& ctx) {
  QuantumState base = prepare_epr(ctx.n() + 1);
  double accept = 0, weight = 0;
  for (const auto& [masks, wgt] : mask_pair_weights(ctx.biased_set())) {
    auto [a, b] = masks;
    if (parity64(a & b) != 0) continue;
    accept += wgt * com_accept_masks(ctx, base, a, b);
    weight += wgt;
  }
  require(weight > 0, "commutation: no compatible question pairs");
  return accept / weight;
}

double exact_anticommutation_accept(const HonestContext& ctx) {
  QuantumState base = prepare_epr(ctx.n() + 1);
  double accept = 0, weight = 0;
  for (const auto& [masks, wgt] : mask_pair_weights(ctx.biased_set())) {
    auto [a, b] = masks;
    if (parity64(a & b) != 1) continue;
    accept += wgt * acom_accept_masks(ctx, base, a, b);
    weight += wgt;
  }
  require(weight > 0, "anticommutation: no compatible question pairs");
  return accept / weight;
}

double exact_braiding_accept(const HonestContext& ctx, bool strict) {
  QuantumState base = prepare_epr(ctx.n() + 1);
  double accept = 0;
  for (const auto& [masks, wgt] : mask_pair_weights(ctx.biased_set())) {
    auto [a, b] = masks;
    int par = parity64(a & b);
    double com = par == 0 ? com_accept_masks(ctx, base, a, b) : 1.0;
    double acom = par == 1 ? acom_accept_masks(ctx, base, a, b) : 1.0;
    if (strict)
      accept += wgt * (par == 0 ? com : acom);
    else
      accept += wgt * 0.5 * (com + acom);
  }
  return accept;
}

double exact_mixed_accept(const HonestContext& ctx) {
  int n = ctx.n();
  QuantumState base = prepare_epr(n + 1);
  Idx ix = Idx::of(n, base);
  double accept = 0;
  auto draws = enumerate_draws(ctx.mh());
  for (Basis W : {Basis::Z, Basis::X}) {
    auto wl = PauliString::uniform(basis_letter(W), n);
    auto alice = measure_bases_branches(base, ix.alice_mask_all(), wl);
    for (auto& [u, ast] : alice) {
      // consistency branch: Bob measures the same basis
      for (auto& [v, st] : measure_bases_branches(ast, ix.bob_mask_all(), wl))
        if (u == v) accept += 0.25 * st.norm2();
      // sampler branch: Bob measures the drawn string
      for (const auto& d : draws) {
        for (auto& [v, st] : measure_bases_branches(ast, ix.bob_mask_all(), d.w)) {
          bool ok = true;
          for (int i = 0; i < n && ok; ++i)
            if (d.w[i] == basis_letter(W) && (((u >> i) ^ (v >> i)) & 1))
              ok = false;
          if (ok) accept += 0.25 * d.weight * st.norm2();
        }
      }
    }
  }
  return accept;
}

double exact_hamiltonian_accept(const HonestContext& ctx) {
  int n = ctx.n();
  // teleport every witness qubit, tracking physical positions as the
  // measured qubits are dropped
  std::vector<int> pos(size_t(3 * n + 2), 0);
  for (int i = 0; i < 3 * n + 2; ++i) pos[size_t(i)] = i;
  auto drop = [&pos](int physical) {
    for (auto& p : pos)
      if (p > physical) --p;
  };
  struct Branch {
    BitVec ux, uz;
    QuantumState st;
  };
  std::vector<Branch> branches{
      {BitVec::zeros(n), BitVec::zeros(n), ctx.initial_state()}};
  for (int i = 0; i < n; ++i) {
    int src = pos[size_t(i)];
    int half = pos[size_t(n + 1 + i)];
    std::vector<Branch> next;
    for (auto& br : branches) {
      for (auto& bell : bell_measure_branches(br.st, src, half)) {
        Branch nb{br.ux, br.uz, std::move(bell.post)};
        nb.ux.set(i, bell.ux);
        nb.uz.set(i, bell.uz);
        next.push_back(std::move(nb));
      }
    }
    branches.swap(next);
    int hi = std::max(src, half), lo = std::min(src, half);
    drop(hi);
    drop(lo);
  }
  std::vector<int> bob_mask;
  for (int i = 0; i < n; ++i) bob_mask.push_back(pos[size_t(2 * n + 2 + i)]);
  auto draws = enumerate_draws(ctx.mh());
  double accept = 0;
  for (auto& br : branches) {
    double weight = br.st.norm2();
    if (weight < kPrune) continue;
    QuantumState bob = extract_pure_subsystem(br.st, bob_mask);
    std::vector<int> all(size_t(n), 0);
    for (int i = 0; i < n; ++i) all[size_t(i)] = i;
    for (const auto& d : draws) {
      for (auto& [v, st] : measure_bases_branches(bob, all, d.w)) {
        BitVec s = ham_corrected(d.w, BitVec::from_u64(v, n), br.ux, br.uz);
        if (d.accept(s)) accept += weight * d.weight * st.norm2();
      }
    }
  }
  return accept;
}

double exact_main_accept(const HonestContext& ctx, bool strict) {
  return (exact_braiding_accept(ctx, strict) + exact_mixed_accept(ctx) +
          exact_hamiltonian_accept(ctx)) /
         3.0;
}

std::map<std::pair<std::string, std::string>, double> exact_joint_answers(
    const HonestContext& ctx, const QuestionPair& qp) {
  std::map<std::pair<std::string, std::string>, double> joint;
  QuantumState base = ctx.initial_state();
  for (auto& [aa, ast] : ctx.alice_branches(qp.alice, base)) {
    if (ast.norm2() < kPrune) continue;
    for (auto& [bb, bst] : ctx.bob_branches(qp.bob, ast)) {
      if (bst.norm2() < kPrune) continue;
      joint[{answer_hex(aa.bits), answer_hex(bb.bits)}] += bst.norm2();
    }
  }
  return joint;
}

double exact_accept_tables(const BiasedSet& S,
                           const MeasurementHamiltonian& mh,
                           const AnswerTable& alice, const AnswerTable& bob,
                           const std::string& test_id, bool strict) {
  auto answer = [](const AnswerTable& t, const Question& q) {
    auto v = t(q);
    require(v.has_value(), "classical strategy: table has no entry");
    return Answer{*v};
  };
  if (test_id == "commutation" || test_id == "anticommutation" ||
      test_id == "braiding") {
    double accept = 0, weight = 0;
    bool com_only = test_id == "commutation";
    bool acom_only = test_id == "anticommutation";
    for (uint32_t ra = 0; ra < uint32_t(S.size()); ++ra) {
      for (uint32_t rb = 0; rb < uint32_t(S.size()); ++rb) {
        int par = parity64(S.member(ra) & S.member(rb));
        if (com_only && par != 0) continue;
        if (acom_only && par != 1) continue;
        // commutation branch
        double com = 0;
        if (!acom_only) {
          QuestionPair qp;
          qp.test_id = "commutation";
          qp.alice = ComQ{ra, rb};
          Answer aa = answer(alice, qp.alice);
          for (Basis W : {Basis::Z, Basis::X}) {
            qp.bob = PureBasisQ{W};
            com += 0.5 * (verdict_of(S, mh, qp, aa,
                                     answer(bob, qp.bob))
                              ? 1.0
                              : 0.0);
          }
        }
        // anticommutation branch
        double acom = 0;
        for (int j = 1; j <= 9 && !com_only; ++j) {
          int row = (j - 1) / 3, col = (j - 1) % 3;
          for (int line : {row, 3 + col}) {
            auto cells = ms_line_cells(line);
            QuestionPair qp;
            qp.test_id = "anticommutation";
            qp.alice = MsAliceQ{ra, rb, cells[0], cells[1], cells[2]};
            if (j == 2)
              qp.bob = PureBasisQ{Basis::Z};
            else if (j == 4)
              qp.bob = PureBasisQ{Basis::X};
            else
              qp.bob = MsBobQ{ra, rb, j};
            acom += (verdict_of(S, mh, qp, answer(alice, qp.alice),
                                answer(bob, qp.bob))
                         ? 1.0
                         : 0.0) /
                    18.0;
          }
        }
        double value;
        if (com_only)
          value = com;
        else if (acom_only)
          value = acom;
        else if (strict)
          value = par == 0 ? com : acom;
        else
          value = 0.5 * (par == 0 ? com : 1.0) + 0.5 * (par == 1 ? acom : 1.0);
        accept += value;
        weight += 1;
      }
    }
    require(weight > 0, "table evaluation: empty question set");
    return accept / weight;
  }
  if (test_id == "mixed") {
    auto draws = enumerate_draws(mh);
    double accept = 0;
    for (Basis W : {Basis::Z, Basis::X}) {
      QuestionPair qp;
      qp.test_id = "mixed";
      qp.alice = PureBasisQ{W};
      Answer aa = answer(alice, qp.alice);
      qp.bob = PureBasisQ{W};
      accept += 0.25 * (verdict_of(S, mh, qp, aa, answer(bob, qp.bob)) ? 1 : 0);
      for (const auto& d : draws) {
        qp.bob = MixedQ{d.seed};
        // the verdict only reads the seed through the sampled string, so a
        // representative seed per draw is exact
        PauliString w = d.w;
        Answer bb = answer(bob, qp.bob);
        bool ok = true;
        for (int i = 0; i < w.size() && ok; ++i)
          if (w[i] == basis_letter(W) && aa.bits.get(i) != bb.bits.get(i))
            ok = false;
        accept += 0.25 * d.weight * (ok ? 1 : 0);
      }
    }
    return accept;
  }
  if (test_id == "hamiltonian") {
    auto draws = enumerate_draws(mh);
    QuestionPair qp;
    qp.test_id = "hamiltonian";
    qp.alice = TeleQ{};
    Answer aa = answer(alice, qp.alice);
    int n = mh.n;
    BitVec ux = aa.bits.slice(0, n), uz = aa.bits.slice(n, n);
    double accept = 0;
    for (const auto& d : draws) {
      Answer bb = answer(bob, Question{MixedQ{d.seed}});
      BitVec s = ham_corrected(d.w, bb.bits, ux, uz);
      accept += d.weight * (d.accept(s) ? 1 : 0);
    }
    return accept;
  }
  if (test_id == "main") {
    return (exact_accept_tables(S, mh, alice, bob, "braiding", strict) +
            exact_accept_tables(S, mh, alice, bob, "mixed", strict) +
            exact_accept_tables(S, mh, alice, bob, "hamiltonian", strict)) /
           3.0;
  }
  throw Error("exact_accept_tables: unknown test id " + test_id);
}

// ------------------------------------------------------------------- misc

std::string answer_hex(const BitVec& bits) {
  return to_hex(bits.bytes) + "/" + std::to_string(bits.bits);
}

std::string question_key(const Question& q) {
  std::ostringstream os;
  if (const auto* c = std::get_if<ComQ>(&q))
    os << "com:" << c->ra << ":" << c->rb;
  else if (const auto* m = std::get_if<MsAliceQ>(&q))
    os << "msA:" << m->ra << ":" << m->rb << ":" << m->i1 << ":" << m->i2
       << ":" << m->i3;
  else if (const auto* b = std::get_if<MsBobQ>(&q))
    os << "msB:" << b->ra << ":" << b->rb << ":" << b->j;
  else if (const auto* p = std::get_if<PureBasisQ>(&q))
    os << "pure:" << (p->w == Basis::X ? "X" : "Z");
  else if (const auto* x = std::get_if<MixedQ>(&q))
    os << "mixed:" << to_hex(x->seed.bytes) << ":" << x->seed.bits;
  else
    os << "tele";
  return os.str();
}

std::string GameTranscript::to_json() const {
  nlohmann::json j;
  j["test"] = test_id;
  j["alice_q"] = question_key(alice_q);
  j["alice_a"] = answer_hex(alice_a.bits);
  j["bob_q"] = question_key(bob_q);
  j["bob_a"] = answer_hex(bob_a.bits);
  j["verdict"] = verdict;
  j["rng_seed"] = to_hex_u64(rng_seed);
  j["rng_draws"] = rng_draws;
  return j.dump();
}

}  // namespace qarg
