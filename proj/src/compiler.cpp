#include "qarg/compiler.hpp"

#include <nlohmann/json.hpp>

#include "qarg/sha256.hpp"

namespace qarg {

namespace {

void put_u32(Bytes& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(uint8_t(v >> (8 * i)));
}

uint32_t get_u32(const Bytes& in, size_t& pos) {
  require(pos + 4 <= in.size(), "wire: truncated u32");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(in[pos + size_t(i)]) << (8 * i);
  pos += 4;
  return v;
}

}  // namespace

Bytes question_to_bytes(const Question& q) {
  Bytes out;
  if (const auto* c = std::get_if<ComQ>(&q)) {
    out.push_back(0);
    put_u32(out, c->ra);
    put_u32(out, c->rb);
  } else if (const auto* m = std::get_if<MsAliceQ>(&q)) {
    out.push_back(1);
    put_u32(out, m->ra);
    put_u32(out, m->rb);
    out.push_back(uint8_t(m->i1));
    out.push_back(uint8_t(m->i2));
    out.push_back(uint8_t(m->i3));
  } else if (const auto* b = std::get_if<MsBobQ>(&q)) {
    out.push_back(2);
    put_u32(out, b->ra);
    put_u32(out, b->rb);
    out.push_back(uint8_t(b->j));
  } else if (const auto* p = std::get_if<PureBasisQ>(&q)) {
    out.push_back(3);
    out.push_back(p->w == Basis::X ? 1 : 0);
  } else if (const auto* x = std::get_if<MixedQ>(&q)) {
    out.push_back(4);
    put_u32(out, uint32_t(x->seed.bits));
    out.insert(out.end(), x->seed.bytes.begin(), x->seed.bytes.end());
  } else {
    out.push_back(5);  // tele
  }
  return out;
}

Question question_from_bytes(const Bytes& data) {
  require(!data.empty(), "question: empty encoding");
  size_t pos = 1;
  switch (data[0]) {
    case 0: {
      ComQ c;
      c.ra = get_u32(data, pos);
      c.rb = get_u32(data, pos);
      return c;
    }
    case 1: {
      MsAliceQ m;
      m.ra = get_u32(data, pos);
      m.rb = get_u32(data, pos);
      require(pos + 3 <= data.size(), "question: truncated");
      m.i1 = data[pos++];
      m.i2 = data[pos++];
      m.i3 = data[pos++];
      return m;
    }
    case 2: {
      MsBobQ b;
      b.ra = get_u32(data, pos);
      b.rb = get_u32(data, pos);
      require(pos + 1 <= data.size(), "question: truncated");
      b.j = data[pos++];
      return b;
    }
    case 3: {
      require(pos + 1 <= data.size(), "question: truncated");
      return PureBasisQ{data[pos] ? Basis::X : Basis::Z};
    }
    case 4: {
      MixedQ x;
      uint32_t bits = get_u32(data, pos);
      x.seed = BitVec::zeros(int(bits));
      require(data.size() - pos == x.seed.bytes.size(),
              "question: seed length mismatch");
      std::copy(data.begin() + long(pos), data.end(), x.seed.bytes.begin());
      return x;
    }
    case 5: return TeleQ{};
    default: throw Error("question: unknown tag");
  }
}

Bytes Ciphertext::to_wire() const {
  Bytes body;
  body.push_back(uint8_t(scheme.size()));
  body.insert(body.end(), scheme.begin(), scheme.end());
  body.push_back(uint8_t(nonce.size()));
  body.insert(body.end(), nonce.begin(), nonce.end());
  Bytes out;
  put_u32(out, uint32_t(body.size() + payload.size()));
  out.insert(out.end(), body.begin(), body.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Ciphertext Ciphertext::from_wire(const Bytes& data) {
  size_t pos = 0;
  uint32_t len = get_u32(data, pos);
  require(pos + len == data.size(), "ciphertext: framing mismatch");
  require(pos < data.size(), "ciphertext: empty frame");
  uint8_t slen = data[pos++];
  require(pos + slen <= data.size(), "ciphertext: truncated scheme id");
  Ciphertext ct;
  ct.scheme.assign(data.begin() + long(pos), data.begin() + long(pos + slen));
  pos += slen;
  require(pos < data.size(), "ciphertext: missing nonce");
  uint8_t nlen = data[pos++];
  require(pos + nlen <= data.size(), "ciphertext: truncated nonce");
  ct.nonce.assign(data.begin() + long(pos), data.begin() + long(pos + nlen));
  pos += nlen;
  ct.payload.assign(data.begin() + long(pos), data.end());
  return ct;
}

AliceCircuit honest_alice_circuit(std::shared_ptr<const HonestContext> ctx) {
  AliceCircuit c;
  c.branches = [ctx](const Question& q, const QuantumState& st) {
    return ctx->alice_branches(q, st);
  };
  c.sample = [ctx](const Question& q, const QuantumState& st, Rng& rng) {
    return ctx->respond_sampled(true, q, st, rng);
  };
  return c;
}

// ------------------------------------------------------------- transparent

namespace {

class TransparentQhe final : public QheScheme {
 public:
  std::string name() const override { return "transparent"; }
  bool semantically_secure() const override { return false; }

  SecretKey gen(int secparam, Rng& rng) const override {
    SecretKey sk;
    sk.secparam = secparam;
    // nonce length tracks the security parameter for the byte accounting
    int len = std::max(8, secparam / 8);
    for (int i = 0; i < len; ++i) sk.nonce.push_back(uint8_t(rng.next_u64()));
    return sk;
  }

  Ciphertext enc(const SecretKey& sk, const Question& x) const override {
    Ciphertext ct;
    ct.scheme = name();
    ct.nonce = sk.nonce;
    Bytes q = question_to_bytes(x);
    ct.payload.push_back(0);  // question marker
    ct.payload.insert(ct.payload.end(), q.begin(), q.end());
    return ct;
  }

  std::pair<Ciphertext, QuantumState> eval(const AliceCircuit& c,
                                           const QuantumState& state,
                                           const Ciphertext& ct,
                                           Rng& rng) const override {
    Question x = unwrap(ct);
    auto [ans, post] = c.sample(x, state, rng);
    return {wrap_answer(ct, ans), post};
  }

  std::vector<std::tuple<Ciphertext, QuantumState, double>> eval_branches(
      const AliceCircuit& c, const QuantumState& state,
      const Ciphertext& ct) const override {
    Question x = unwrap(ct);
    std::vector<std::tuple<Ciphertext, QuantumState, double>> out;
    for (auto& [ans, st] : c.branches(x, state)) {
      double p = st.norm2();
      out.emplace_back(wrap_answer(ct, ans), std::move(st), p);
    }
    return out;
  }

  BitVec dec(const SecretKey& sk, const Ciphertext& ct) const override {
    require(ct.scheme == name(), "dec: scheme mismatch");
    require(ct.nonce == sk.nonce, "dec: key mismatch");
    require(!ct.payload.empty() && ct.payload[0] == 1,
            "dec: not an answer ciphertext");
    size_t pos = 1;
    uint32_t bits = get_u32(ct.payload, pos);
    BitVec v = BitVec::zeros(int(bits));
    require(ct.payload.size() - pos == v.bytes.size(),
            "dec: truncated answer");
    std::copy(ct.payload.begin() + long(pos), ct.payload.end(),
              v.bytes.begin());
    return v;
  }

 private:
  Question unwrap(const Ciphertext& ct) const {
    require(ct.scheme == name(), "eval: scheme mismatch");
    require(!ct.payload.empty() && ct.payload[0] == 0,
            "eval: not a question ciphertext");
    return question_from_bytes(
        Bytes(ct.payload.begin() + 1, ct.payload.end()));
  }

  Ciphertext wrap_answer(const Ciphertext& in, const Answer& ans) const {
    Ciphertext ct;
    ct.scheme = name();
    ct.nonce = in.nonce;
    ct.payload.push_back(1);  // answer marker
    put_u32(ct.payload, uint32_t(ans.bits.bits));
    ct.payload.insert(ct.payload.end(), ans.bits.bytes.begin(),
                      ans.bits.bytes.end());
    return ct;
  }
};

// ---------------------------------------------------------------- pauli otp

class PauliOtpQhe final : public QheScheme {
 public:
  std::string name() const override { return "pauli-otp"; }
  bool semantically_secure() const override { return false; }

  SecretKey gen(int secparam, Rng& rng) const override {
    SecretKey sk;
    sk.secparam = secparam;
    int len = std::max(16, secparam / 8);
    for (int i = 0; i < len; ++i)
      sk.material.push_back(uint8_t(rng.next_u64()));
    sk.nonce = HashSpec{sk.material}.digest({0x6b});
    sk.nonce.resize(8);
    return sk;
  }

  Ciphertext enc(const SecretKey& sk, const Question& x) const override {
    // question type stays in the clear (it is protocol structure); the
    // parameters are XOR-padded
    Ciphertext ct;
    ct.scheme = name();
    ct.nonce = sk.nonce;
    Bytes q = question_to_bytes(x);
    ct.payload.push_back(q[0]);
    Bytes pad = stream(sk.material, q.size());
    for (size_t i = 1; i < q.size(); ++i)
      ct.payload.push_back(uint8_t(q[i] ^ pad[i]));
    return ct;
  }

  std::pair<Ciphertext, QuantumState> eval(const AliceCircuit& c,
                                           const QuantumState& state,
                                           const Ciphertext& ct,
                                           Rng& rng) const override {
    auto [ans, post] = c.sample(supported_plaintext(ct), state, rng);
    return {wrap_answer(ct, ans), post};
  }

  std::vector<std::tuple<Ciphertext, QuantumState, double>> eval_branches(
      const AliceCircuit& c, const QuantumState& state,
      const Ciphertext& ct) const override {
    Question x = supported_plaintext(ct);
    std::vector<std::tuple<Ciphertext, QuantumState, double>> out;
    for (auto& [ans, st] : c.branches(x, state)) {
      double p = st.norm2();
      out.emplace_back(wrap_answer(ct, ans), std::move(st), p);
    }
    return out;
  }

  BitVec dec(const SecretKey& sk, const Ciphertext& ct) const override {
    require(ct.scheme == name(), "dec: scheme mismatch");
    require(ct.nonce == sk.nonce, "dec: key mismatch");
    require(!ct.payload.empty() && ct.payload[0] == 1,
            "dec: not an answer ciphertext");
    size_t pos = 1;
    uint32_t bits = get_u32(ct.payload, pos);
    BitVec v = BitVec::zeros(int(bits));
    require(ct.payload.size() - pos == v.bytes.size(),
            "dec: truncated answer");
    std::copy(ct.payload.begin() + long(pos), ct.payload.end(),
              v.bytes.begin());
    return v;
  }

 private:
  static Bytes stream(const Bytes& key, size_t len) {
    Bytes out;
    uint8_t ctr = 0;
    HashSpec h{key};
    while (out.size() < len) {
      Bytes blk = h.digest({0x70, ctr++});
      out.insert(out.end(), blk.begin(), blk.end());
    }
    out.resize(len);
    return out;
  }

  Question supported_plaintext(const Ciphertext& ct) const {
    require(ct.scheme == name(), "eval: scheme mismatch");
    require(!ct.payload.empty(), "eval: empty ciphertext");
    // the measurement must not depend on the padded parameters; only the
    // teleportation circuit qualifies among the honest Alice actions
    require(ct.payload[0] == 5,
            "pauli-otp eval: unsupported Alice circuit for this scheme");
    return TeleQ{};
  }

  Ciphertext wrap_answer(const Ciphertext& in, const Answer& ans) const {
    // teleportation outcomes are the output's Pauli pad keys; they are
    // uniform, so the answer rides in the clear under the key nonce
    Ciphertext ct;
    ct.scheme = name();
    ct.nonce = in.nonce;
    ct.payload.push_back(1);
    put_u32(ct.payload, uint32_t(ans.bits.bits));
    ct.payload.insert(ct.payload.end(), ans.bits.bytes.begin(),
                      ans.bits.bytes.end());
    return ct;
  }
};

}  // namespace

std::shared_ptr<const QheScheme> transparent_qhe() {
  return std::make_shared<TransparentQhe>();
}

std::shared_ptr<const QheScheme> pauli_otp_qhe() {
  return std::make_shared<PauliOtpQhe>();
}

// ------------------------------------------------------------------- runs

CompiledProver honest_compiled_prover(
    std::shared_ptr<const HonestContext> ctx,
    std::shared_ptr<const QheScheme> qhe) {
  CompiledProver p;
  p.initial = ctx->initial_state();
  AliceCircuit circuit = honest_alice_circuit(ctx);
  p.round1 = [ctx, qhe, circuit](const Ciphertext& c, const QuantumState& st,
                                 Rng& rng) {
    return qhe->eval(circuit, st, c, rng);
  };
  p.round2 = [ctx](const Question& y, const QuantumState& st, Rng& rng) {
    return ctx->respond_sampled(false, y, st, rng).first;
  };
  return p;
}

CompiledTranscript compile_and_run(const BiasedSet& S,
                                   const MeasurementHamiltonian& mh,
                                   const QheScheme& qhe,
                                   const CompiledProver& prover, int secparam,
                                   Rng& rng, const QuestionPair* forced) {
  QuestionPair qp =
      forced ? *forced : sample_main_questions(S, mh, rng, false);
  SecretKey sk = qhe.gen(secparam, rng);
  CompiledTranscript t;
  t.test_id = qp.test_id;
  t.y = qp.bob;
  t.c = qhe.enc(sk, qp.alice);
  auto [alpha, post] = prover.round1(t.c, prover.initial, rng);
  t.alpha = alpha;
  // y is revealed only now
  t.b = prover.round2(qp.bob, post, rng);
  try {
    t.decrypted_a = qhe.dec(sk, t.alpha);
  } catch (const Error& e) {
    t.decryption_failed = true;
    t.diagnostic = e.what();
    t.verdict = false;
    return t;
  }
  t.verdict = verdict_of(S, mh, qp, Answer{t.decrypted_a}, t.b);
  return t;
}

std::map<std::pair<std::string, std::string>, double> exact_compiled_joint(
    const HonestContext& ctx, const QheScheme& qhe, int secparam,
    const QuestionPair& qp, Rng& rng) {
  SecretKey sk = qhe.gen(secparam, rng);
  Ciphertext c = qhe.enc(sk, qp.alice);
  AliceCircuit circuit = honest_alice_circuit(
      std::make_shared<HonestContext>(ctx));
  std::map<std::pair<std::string, std::string>, double> joint;
  for (auto& [alpha, post, p] :
       qhe.eval_branches(circuit, ctx.initial_state(), c)) {
    if (p < 1e-24) continue;
    BitVec a = qhe.dec(sk, alpha);
    for (auto& [bb, bst] : ctx.bob_branches(qp.bob, post)) {
      if (bst.norm2() < 1e-24) continue;
      joint[{answer_hex(a), answer_hex(bb.bits)}] += bst.norm2();
    }
  }
  return joint;
}

std::string CompiledTranscript::to_json() const {
  nlohmann::json j;
  j["test"] = test_id;
  j["c"] = to_hex(c.to_wire());
  j["alpha"] = to_hex(alpha.to_wire());
  j["y"] = question_key(y);
  j["b"] = answer_hex(b.bits);
  j["a"] = answer_hex(decrypted_a);
  j["verdict"] = verdict;
  j["decryption_failed"] = decryption_failed;
  if (!diagnostic.empty()) j["diagnostic"] = diagnostic;
  return j.dump();
}

}  // namespace qarg
