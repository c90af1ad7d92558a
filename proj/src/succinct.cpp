#include "qarg/succinct.hpp"

#include <nlohmann/json.hpp>

namespace qarg {

namespace {

constexpr size_t kLeafSize = 32;
constexpr size_t kFrame = 4;  // length prefix per wire message

void put_u32(Bytes& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(uint8_t(v >> (8 * i)));
}

uint32_t read_u32(const Bytes& in, size_t pos) {
  require(pos + 4 <= in.size(), "frame: truncated length");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(in[pos + size_t(i)]) << (8 * i);
  return v;
}

int index_bits(size_t leaf_count) {
  int bits = 1;
  while ((size_t{1} << bits) < leaf_count) ++bits;
  return bits;
}

uint64_t challenge_wire_bytes(int k, size_t leaf_count) {
  return kFrame + uint64_t((k * index_bits(leaf_count) + 7) / 8);
}

Bytes serialize_bitvec(const BitVec& v) {
  Bytes out;
  put_u32(out, uint32_t(v.bits));
  out.insert(out.end(), v.bytes.begin(), v.bytes.end());
  return out;
}

BitVec parse_bitvec(const Bytes& data) {
  uint32_t bits = read_u32(data, 0);
  BitVec v = BitVec::zeros(int(bits));
  require(data.size() == 4 + v.bytes.size(), "bitvec: length mismatch");
  std::copy(data.begin() + 4, data.end(), v.bytes.begin());
  return v;
}

}  // namespace

// ---------------------------------------------------------------- prover

Bytes saok_message_bytes(const Bytes& witness) {
  Bytes wt = rs::encode(witness);
  Bytes m;
  put_u32(m, uint32_t(wt.size()));
  m.insert(m.end(), wt.begin(), wt.end());
  put_u32(m, uint32_t(witness.size()));
  m.insert(m.end(), witness.begin(), witness.end());  // naive proof: pi = w
  return m;
}

std::pair<size_t, size_t> saok_encoded_region(const Bytes& m) {
  uint32_t len = read_u32(m, 0);
  require(4 + size_t(len) <= m.size(), "saok message: bad frame");
  return {4, 4 + size_t(len)};
}

SaokProver::SaokProver(const Bytes& witness, const HashSpec& hash)
    : SaokProver(saok_message_bytes(witness), witness, hash) {}

SaokProver::SaokProver(const Bytes& m_bytes, const Bytes& w_bytes,
                       const HashSpec& hash)
    : m_(m_bytes),
      w_(w_bytes),
      tree_m_(bytes_to_leaves(m_, kLeafSize), hash),
      tree_w_(bytes_to_leaves(w_, kLeafSize), hash) {}

std::vector<SaokOpening> SaokProver::respond(
    const std::vector<uint64_t>& j) const {
  std::vector<SaokOpening> out;
  out.reserve(j.size());
  for (uint64_t index : j) {
    SaokOpening o;
    o.index = index;
    o.leaf = tree_m_.leaf(size_t(index));
    o.path = tree_m_.open(size_t(index));
    out.push_back(std::move(o));
  }
  return out;
}

// -------------------------------------------------------------- verifier

bool saok_verify(const SaokTranscript& t, const Relation& rel,
                 const HashSpec& hash, const Bytes* reference_m) {
  if (t.openings.size() != t.challenges.size()) return false;
  for (size_t i = 0; i < t.openings.size(); ++i) {
    const auto& o = t.openings[i];
    if (o.index != t.challenges[i]) return false;
    if (!merkle_verify(t.rt_m, size_t(o.index), o.leaf, o.path, hash))
      return false;
    if (reference_m) {
      size_t from = size_t(o.index) * kLeafSize;
      size_t to = std::min(from + kLeafSize, reference_m->size());
      Bytes want = from < to ? Bytes(reference_m->begin() + long(from),
                                     reference_m->begin() + long(to))
                             : Bytes{};
      if (o.leaf != want) return false;
    }
  }
  if (reference_m) {
    auto [from, to] = saok_encoded_region(*reference_m);
    auto w = rs::decode(Bytes(reference_m->begin() + long(from),
                              reference_m->begin() + long(to)));
    if (!w) return false;
    if (!rel.decide(rel.instance, *w)) return false;
  }
  return true;
}

SaokTranscript saok_run(const SaokProver& prover, const Relation& rel,
                        const HashSpec& hash, int k, Rng& rng,
                        const Bytes* reference_m) {
  require(k >= 1, "saok: need at least one challenge");
  SaokTranscript t;
  t.rt_m = prover.rt_m();
  t.rt_w = prover.rt_w();
  t.m_leaves = prover.m_leaf_count();
  t.m_bytes_len = prover.m_bytes().size();
  for (int i = 0; i < k; ++i)
    t.challenges.push_back(rng.next_below(prover.m_leaf_count()));
  t.openings = prover.respond(t.challenges);
  t.verdict = saok_verify(t, rel, hash, reference_m);
  // wire accounting: roots down, packed challenge indices up, openings down
  t.prover_bytes = 2 * (kFrame + t.rt_m.size());
  t.verifier_bytes = challenge_wire_bytes(k, prover.m_leaf_count());
  for (const auto& o : t.openings)
    t.prover_bytes +=
        kFrame + o.leaf.size() + o.path.siblings.size() * t.rt_m.size();
  return t;
}

// ----------------------------------------------------------- full protocol

SuccinctProver succinct_prover_from_compiled(const CompiledProver& prover) {
  SuccinctProver p;
  auto state = std::make_shared<QuantumState>(prover.initial);
  p.answer1 = [state, prover](const Ciphertext& c, Rng& rng) {
    auto [alpha, post] = prover.round1(c, *state, rng);
    *state = post;
    return alpha;
  };
  p.answer2 = [state, prover](const Question& y, Rng& rng) {
    return prover.round2(y, *state, rng);
  };
  return p;
}

SuccinctProver zero_answer_prover(int n, const std::string& scheme_name) {
  SuccinctProver p;
  p.answer1 = [n, scheme_name](const Ciphertext& c, Rng&) {
    Ciphertext alpha;
    alpha.scheme = scheme_name;
    alpha.nonce = c.nonce;
    alpha.payload.push_back(1);
    BitVec zeros = BitVec::zeros(2 * n);
    put_u32(alpha.payload, uint32_t(zeros.bits));
    alpha.payload.insert(alpha.payload.end(), zeros.bytes.begin(),
                         zeros.bytes.end());
    return alpha;
  };
  p.answer2 = [n](const Question& q, Rng&) {
    if (std::get_if<MsBobQ>(&q)) return Answer{BitVec::zeros(1)};
    return Answer{BitVec::zeros(n)};
  };
  return p;
}

Relation phase3_relation(const BiasedSet& S, const MeasurementHamiltonian& mh,
                         const QuestionPair& qp, const SecretKey& sk,
                         const QheScheme& qhe, const Bytes& root1,
                         const Bytes& root2, const HashSpec& hash,
                         bool* verdict_out) {
  Relation r3;
  r3.instance = root1;
  r3.instance.insert(r3.instance.end(), root2.begin(), root2.end());
  r3.time_bound = int64_t(1) << 30;
  const QheScheme* qhep = &qhe;
  r3.decide = [&S, &mh, qp, sk, qhep, root1, root2, hash, verdict_out](
                  const Bytes&, const Bytes& witness) {
    try {
      size_t pos = 0;
      uint32_t l1 = read_u32(witness, pos);
      pos += 4;
      require(pos + l1 <= witness.size(), "phase3 witness: truncated");
      Bytes a1(witness.begin() + long(pos), witness.begin() + long(pos + l1));
      pos += l1;
      uint32_t l2 = read_u32(witness, pos);
      pos += 4;
      require(pos + l2 == witness.size(), "phase3 witness: trailing bytes");
      Bytes a2(witness.begin() + long(pos), witness.end());
      // binding back to the phase commitments
      if (MerkleCommitment(bytes_to_leaves(a1, kLeafSize), hash).root() !=
          root1)
        return false;
      if (MerkleCommitment(bytes_to_leaves(a2, kLeafSize), hash).root() !=
          root2)
        return false;
      BitVec a = qhep->dec(sk, Ciphertext::from_wire(a1));
      Answer bob{parse_bitvec(a2)};
      bool v = verdict_of(S, mh, qp, Answer{a}, bob);
      if (verdict_out) *verdict_out = v;
      return v;
    } catch (const Error&) {
      return false;
    }
  };
  return r3;
}

SuccinctTranscript run_succinct_protocol(const BiasedSet& S,
                                         const MeasurementHamiltonian& mh,
                                         const QheScheme& qhe,
                                         const SuccinctProver& prover,
                                         const SuccinctConfig& cfg, Rng& rng,
                                         const QuestionPair* forced) {
  SuccinctTranscript t;
  QuestionPair qp =
      forced ? *forced : sample_main_questions(S, mh, rng, false);
  SecretKey sk = qhe.gen(cfg.secparam, rng);
  Ciphertext c1 = qhe.enc(sk, qp.alice);
  Bytes c1_wire = c1.to_wire();
  // phase 1a: hash key and encrypted Alice question travel down
  t.verifier_to_prover_bytes += kFrame + cfg.hash.key.size();
  t.verifier_to_prover_bytes += kFrame + c1_wire.size();

  Ciphertext alpha = prover.answer1(c1, rng);
  Bytes w1 = alpha.to_wire();
  MerkleCommitment com1(bytes_to_leaves(w1, kLeafSize), cfg.hash);
  t.prover_to_verifier_bytes += kFrame + com1.root().size();

  auto opening_relation = [&cfg](const Bytes& com) {
    Relation r;
    r.instance = com;
    HashSpec hash = cfg.hash;
    r.decide = [hash](const Bytes& instance, const Bytes& witness) {
      MerkleCommitment tree(bytes_to_leaves(witness, kLeafSize), hash);
      return tree.root() == instance;
    };
    r.time_bound = int64_t(1) << 24;
    return r;
  };

  auto run_phase = [&](const std::string& name, const Bytes& witness,
                       const Relation& rel) {
    SaokProver sp(witness, cfg.hash);
    SuccinctPhase phase;
    phase.name = name;
    phase.saok = saok_run(sp, rel, cfg.hash, cfg.k, rng, &sp.m_bytes());
    phase.ok = phase.saok.verdict;
    t.verifier_to_prover_bytes += phase.saok.verifier_bytes;
    t.prover_to_verifier_bytes += phase.saok.prover_bytes;
    t.phases.push_back(phase);
    return phase.ok;
  };

  bool ok1 = run_phase("phase1", w1, opening_relation(com1.root()));

  // phase 2: Bob question in the clear
  Bytes q2 = question_to_bytes(qp.bob);
  t.verifier_to_prover_bytes += kFrame + q2.size();
  Answer b = prover.answer2(qp.bob, rng);
  Bytes w2 = serialize_bitvec(b.bits);
  MerkleCommitment com2(bytes_to_leaves(w2, kLeafSize), cfg.hash);
  t.prover_to_verifier_bytes += kFrame + com2.root().size();
  bool ok2 = run_phase("phase2", w2, opening_relation(com2.root()));

  // phase 3: the key is revealed, the prover argues the verdict
  t.verifier_to_prover_bytes +=
      kFrame + sk.material.size() + sk.nonce.size() + 4;
  Bytes w3;
  put_u32(w3, uint32_t(w1.size()));
  w3.insert(w3.end(), w1.begin(), w1.end());
  put_u32(w3, uint32_t(w2.size()));
  w3.insert(w3.end(), w2.begin(), w2.end());
  if (prover.tamper3) w3 = prover.tamper3(w3);

  Relation r3 = phase3_relation(S, mh, qp, sk, qhe, com1.root(), com2.root(),
                                cfg.hash, &t.compiled_verdict);
  bool ok3 = run_phase("phase3", w3, r3);

  t.verdict = ok1 && ok2 && ok3;
  if (!ok1)
    t.reject_phase = "phase1";
  else if (!ok2)
    t.reject_phase = "phase2";
  else if (!ok3)
    t.reject_phase = "phase3";

  // the uncompressed equivalent: full questions and full committed data
  uint64_t naive = 0;
  naive += kFrame + cfg.hash.key.size();  // hk as-is
  naive += kFrame + c1_wire.size();       // encrypted Alice question as-is
  naive += kFrame + sk.material.size() + sk.nonce.size() + 4;
  if (qp.test_id == "hamiltonian" || qp.test_id == "mixed") {
    // Bob's question sent as the full Pauli string plus the full
    // sampling randomness instead of a short seed
    naive += kFrame + uint64_t((2 * mh.n + 7) / 8);
    naive += kFrame + uint64_t((std::max<int64_t>(cfg.naive_seed_bits,
                                                  mh.seed_bits) +
                                7) /
                               8);
  } else {
    // braiding questions as the full masks rather than set indices
    naive += kFrame + uint64_t((2 * mh.n + 7) / 8);
  }
  for (const auto& phase : t.phases)
    naive += kFrame + uint64_t(phase.saok.m_bytes_len);  // m in full
  naive += kFrame + w1.size() + kFrame + w2.size() + kFrame + w3.size();
  t.naive_baseline_bytes = naive;
  return t;
}

std::string SuccinctTranscript::to_json() const {
  nlohmann::json j;
  j["verdict"] = verdict;
  j["reject_phase"] = reject_phase;
  j["compiled_verdict"] = compiled_verdict;
  j["verifier_to_prover_bytes"] = verifier_to_prover_bytes;
  j["prover_to_verifier_bytes"] = prover_to_verifier_bytes;
  j["naive_baseline_bytes"] = naive_baseline_bytes;
  j["phases"] = nlohmann::json::array();
  for (const auto& p : phases) {
    j["phases"].push_back({{"name", p.name},
                           {"ok", p.ok},
                           {"rt_m", to_hex(p.saok.rt_m)},
                           {"rt_w", to_hex(p.saok.rt_w)},
                           {"m_leaves", p.saok.m_leaves},
                           {"verifier_bytes", p.saok.verifier_bytes},
                           {"prover_bytes", p.saok.prover_bytes}});
  }
  return j.dump();
}

// --------------------------------------------------------------- extractor

ProverOracle oracle_of(const SaokProver& prover) {
  ProverOracle o;
  o.rt_m = prover.rt_m();
  o.rt_w = prover.rt_w();
  o.m_leaf_count = prover.m_leaf_count();
  o.respond = [&prover](const std::vector<uint64_t>& j) {
    return prover.respond(j);
  };
  return o;
}

ExtractionResult classical_extract(const ProverOracle& prover,
                                   const Relation& rel, const HashSpec& hash,
                                   int k, int max_rewinds, Rng& rng) {
  ExtractionResult res;
  std::map<uint64_t, Bytes> leaves;
  std::optional<size_t> wt_len;

  auto try_decode = [&]() -> std::optional<Bytes> {
    if (!wt_len) return std::nullopt;
    size_t blocks = *wt_len / size_t(rs::kN);
    Bytes framed;
    for (size_t blk = 0; blk < blocks; ++blk) {
      std::array<uint8_t, rs::kN> symbols{};
      std::vector<int> erasures;
      int known = 0;
      for (int p = 0; p < rs::kN; ++p) {
        size_t byte_pos = 4 + blk * size_t(rs::kN) + size_t(p);
        uint64_t leaf_idx = byte_pos / kLeafSize;
        auto it = leaves.find(leaf_idx);
        if (it == leaves.end() ||
            byte_pos % kLeafSize >= it->second.size()) {
          erasures.push_back(p);
          continue;
        }
        symbols[size_t(p)] = it->second[byte_pos % kLeafSize];
        ++known;
      }
      if (known < rs::kK) return std::nullopt;
      auto data = rs::decode_block(symbols, erasures);
      if (!data) return std::nullopt;
      framed.insert(framed.end(), data->begin(), data->end());
    }
    if (framed.size() < 4) return std::nullopt;
    size_t len = 0;
    for (int i = 0; i < 4; ++i) len |= size_t(framed[size_t(i)]) << (8 * i);
    if (len + 4 > framed.size()) return std::nullopt;
    return Bytes(framed.begin() + 4, framed.begin() + long(4 + len));
  };

  for (int round = 0; round < max_rewinds; ++round) {
    std::vector<uint64_t> challenges;
    for (int i = 0; i < k; ++i)
      challenges.push_back(rng.next_below(prover.m_leaf_count));
    auto openings = prover.respond(challenges);
    res.rewinds = round + 1;
    for (const auto& o : openings) {
      if (!merkle_verify(prover.rt_m, size_t(o.index), o.leaf, o.path, hash))
        continue;  // unverifiable openings carry no information
      auto it = leaves.find(o.index);
      if (it != leaves.end()) {
        if (it->second != o.leaf) {
          res.status = ExtractionResult::BindingViolation;
          res.note = "two verified openings of index " +
                     std::to_string(o.index) + " disagree";
          return res;
        }
        continue;
      }
      leaves.emplace(o.index, o.leaf);
    }
    if (!wt_len && leaves.count(0) && leaves.at(0).size() >= 4) {
      const Bytes& l0 = leaves.at(0);
      size_t len = 0;
      for (int i = 0; i < 4; ++i) len |= size_t(l0[size_t(i)]) << (8 * i);
      if (len == 0 || len % size_t(rs::kN) != 0) {
        res.status = ExtractionResult::Failure;
        res.note = "committed message has a malformed frame";
        return res;
      }
      wt_len = len;
    }
    if (auto w = try_decode()) {
      if (rel.decide(rel.instance, *w)) {
        res.status = ExtractionResult::Success;
        res.witness = *w;
        return res;
      }
      res.status = ExtractionResult::Failure;
      res.note = "decoded witness fails the relation";
      return res;
    }
  }
  res.status = ExtractionResult::Failure;
  res.note = "rewind budget exhausted before decoding";
  return res;
}

}  // namespace qarg
