#include "qarg/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace qarg {

// ---------------------------------------------------------------- BitVec

BitVec BitVec::zeros(int bits) {
  BitVec v;
  v.bits = bits;
  v.bytes.assign(size_t((bits + 7) / 8), 0);
  return v;
}

BitVec BitVec::from_u64(uint64_t value, int bits) {
  require(bits >= 0 && bits <= 64, "BitVec::from_u64: bad width");
  BitVec v = zeros(bits);
  for (int i = 0; i < bits; ++i)
    if ((value >> i) & 1) v.set(i, 1);
  return v;
}

BitVec BitVec::random(int bits, Rng& rng) {
  BitVec v = zeros(bits);
  for (size_t i = 0; i < v.bytes.size(); ++i)
    v.bytes[i] = uint8_t(rng.next_u64());
  // clear slack bits so equality is well defined
  int slack = int(v.bytes.size()) * 8 - bits;
  if (slack > 0 && !v.bytes.empty()) v.bytes.back() &= uint8_t(0xff >> slack);
  return v;
}

int BitVec::get(int i) const {
  require(i >= 0 && i < bits, "BitVec::get: out of range");
  return (bytes[size_t(i / 8)] >> (i % 8)) & 1;
}

void BitVec::set(int i, int v) {
  require(i >= 0 && i < bits, "BitVec::set: out of range");
  uint8_t mask = uint8_t(1 << (i % 8));
  if (v)
    bytes[size_t(i / 8)] |= mask;
  else
    bytes[size_t(i / 8)] &= uint8_t(~mask);
}

uint64_t BitVec::to_u64() const {
  require(bits <= 64, "BitVec::to_u64: too wide");
  uint64_t v = 0;
  for (int i = 0; i < bits; ++i)
    if (get(i)) v |= uint64_t{1} << i;
  return v;
}

BitVec BitVec::slice(int from, int len) const {
  require(from >= 0 && len >= 0 && from + len <= bits, "BitVec::slice");
  BitVec v = zeros(len);
  for (int i = 0; i < len; ++i) v.set(i, get(from + i));
  return v;
}

void BitVec::append(const BitVec& other) {
  int base = bits;
  bits += other.bits;
  bytes.resize(size_t((bits + 7) / 8), 0);
  for (int i = 0; i < other.bits; ++i) set(base + i, other.get(i));
}

// ---------------------------------------------------------- XZHamiltonian

std::string XZHamiltonian::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["terms"] = nlohmann::json::array();
  for (const auto& t : terms) {
    std::string bases;
    for (Letter l : t.bases) bases.push_back(l == Letter::X ? 'X' : 'Z');
    j["terms"].push_back(
        {{"coeff", t.coeff}, {"qubits", t.qubits}, {"bases", bases}});
  }
  return j.dump();
}

XZHamiltonian XZHamiltonian::from_json(const std::string& json) {
  auto j = nlohmann::json::parse(json);
  XZHamiltonian h;
  h.n = j.at("n").get<int>();
  for (const auto& tj : j.at("terms")) {
    XZTerm t;
    t.coeff = tj.at("coeff").get<double>();
    t.qubits = tj.at("qubits").get<std::vector<int>>();
    for (char c : tj.at("bases").get<std::string>()) {
      require(c == 'X' || c == 'Z', "XZHamiltonian: bases must be X or Z");
      t.bases.push_back(c == 'X' ? Letter::X : Letter::Z);
    }
    require(t.qubits.size() == t.bases.size() && !t.qubits.empty() &&
                t.qubits.size() <= 2,
            "XZHamiltonian: terms act on one or two qubits");
    h.terms.push_back(std::move(t));
  }
  return h;
}

namespace {

PauliWord term_word(const XZTerm& t, int n) {
  PauliWord p = PauliWord::identity(n);
  for (size_t k = 0; k < t.qubits.size(); ++k) {
    int q = t.qubits[k];
    require(q >= 0 && q < n, "XZ term: qubit out of range");
    if (t.bases[k] == Letter::X) p.xmask |= uint64_t{1} << q;
    if (t.bases[k] == Letter::Z) p.zmask |= uint64_t{1} << q;
  }
  return p;
}

PauliString term_string(const XZTerm& t, int n) {
  PauliString w = PauliString::uniform(Letter::I, n);
  for (size_t k = 0; k < t.qubits.size(); ++k)
    w.letters[size_t(t.qubits[k])] = t.bases[k];
  return w;
}

uint64_t term_support(const XZTerm& t) {
  uint64_t m = 0;
  for (int q : t.qubits) m |= uint64_t{1} << q;
  return m;
}

}  // namespace

MatrixC XZHamiltonian::dense() const {
  require(n <= kDenseQubitCap, "XZHamiltonian::dense: cap exceeded");
  Eigen::Index dim = dim_for_qubits(n);
  MatrixC h = MatrixC::Zero(dim, dim);
  for (const auto& t : terms) h += t.coeff * word_to_dense(term_word(t, n));
  return h;
}

// ------------------------------------------------------------ mf_convert

MeasurementHamiltonian mf_convert(const XZHamiltonian& h, double alpha_in,
                                  double beta_in, int term_bits,
                                  int coin_bits) {
  require(!h.terms.empty(), "mf_convert: no terms");
  require(term_bits >= 1 && term_bits <= 32, "mf_convert: term_bits");
  require(coin_bits >= 0 && coin_bits <= 32, "mf_convert: coin_bits");
  double total = 0;
  for (const auto& t : h.terms) {
    require(std::isfinite(t.coeff), "mf_convert: coefficient not finite");
    total += std::abs(t.coeff);
  }
  require(total > 0, "mf_convert: all coefficients zero");

  // Dyadic cumulative thresholds; the quantized weights are the ones the
  // sampler realizes, so they are also what the recipe records.
  uint64_t scale = uint64_t{1} << term_bits;
  std::vector<uint64_t> thresholds(h.terms.size() + 1, 0);
  double cum = 0;
  for (size_t j = 0; j < h.terms.size(); ++j) {
    cum += std::abs(h.terms[j].coeff);
    thresholds[j + 1] = uint64_t(std::llround(cum / total * double(scale)));
  }
  thresholds.back() = scale;

  MeasurementHamiltonian mh;
  mh.n = h.n;
  mh.seed_bits = term_bits + coin_bits;
  mh.alpha = 0.5 + alpha_in / (2 * total);
  mh.beta = 0.5 + beta_in / (2 * total);

  struct TermInfo {
    PauliString w;
    uint64_t support;
    int want_parity;  // outcome parity that lands on the low-energy side
  };
  auto infos = std::make_shared<std::vector<TermInfo>>();
  for (const auto& t : h.terms)
    infos->push_back({term_string(t, h.n), term_support(t),
                      t.coeff > 0 ? 1 : 0});

  auto th = std::make_shared<std::vector<uint64_t>>(thresholds);
  int tb = term_bits;
  auto pick_term = [th, tb](const BitVec& seed) -> size_t {
    uint64_t v = seed.slice(0, tb).to_u64();
    size_t lo = 0, hi = th->size() - 1;
    while (lo + 1 < hi) {
      size_t mid = (lo + hi) / 2;
      if ((*th)[mid] <= v)
        lo = mid;
      else
        hi = mid;
    }
    return lo;
  };

  mh.sample_w = [infos, pick_term](const BitVec& seed) {
    return (*infos)[pick_term(seed)].w;
  };
  mh.accept = [infos, pick_term](const BitVec& seed, const BitVec& outcome) {
    const TermInfo& ti = (*infos)[pick_term(seed)];
    int par = 0;
    for (int i = 0; i < outcome.bits; ++i)
      if ((ti.support >> i) & 1) par ^= outcome.get(i);
    return par == ti.want_parity;
  };

  for (size_t j = 0; j < infos->size(); ++j) {
    double weight =
        double(thresholds[j + 1] - thresholds[j]) / double(scale);
    if (weight == 0) continue;
    const TermInfo& ti = (*infos)[j];
    uint64_t support = ti.support;
    int want = ti.want_parity;
    mh.exact_terms.push_back(
        {weight, ti.w, [support, want](const BitVec& outcome) {
           int par = 0;
           for (int i = 0; i < outcome.bits; ++i)
             if ((support >> i) & 1) par ^= outcome.get(i);
           return par == want;
         }});
  }

  nlohmann::json r;
  r["kind"] = "mf";
  r["xz"] = nlohmann::json::parse(h.to_json());
  r["alpha_in"] = alpha_in;
  r["beta_in"] = beta_in;
  r["term_bits"] = term_bits;
  r["coin_bits"] = coin_bits;
  r["coeff_scale"] = total;
  mh.recipe = r.dump();
  return mh;
}

// ----------------------------------------------------------------- dense

namespace {

MatrixC accept_operator(const PauliString& w,
                        const std::function<bool(const BitVec&)>& accept) {
  int n = w.size();
  Eigen::Index dim = dim_for_qubits(n);
  MatrixC op = MatrixC::Zero(dim, dim);
  for (uint64_t u = 0; u < (uint64_t{1} << n); ++u) {
    bool skip = false;
    for (int i = 0; i < n && !skip; ++i)
      if (w[i] == Letter::I && ((u >> i) & 1)) skip = true;
    if (skip) continue;
    if (!accept(BitVec::from_u64(u, n))) continue;
    op += pauli_projector(w, u);
  }
  return op;
}

}  // namespace

MatrixC dense_hamiltonian(const MeasurementHamiltonian& mh) {
  require(mh.n <= kDenseQubitCap, "dense_hamiltonian: cap exceeded");
  Eigen::Index dim = dim_for_qubits(mh.n);
  MatrixC acc = MatrixC::Zero(dim, dim);
  if (!mh.exact_terms.empty()) {
    for (const auto& t : mh.exact_terms)
      acc += t.weight * accept_operator(t.w, t.accept);
  } else {
    require(mh.seed_bits <= 20, "dense_hamiltonian: seed space too large");
    uint64_t count = uint64_t{1} << mh.seed_bits;
    for (uint64_t s = 0; s < count; ++s) {
      BitVec seed = BitVec::from_u64(s, mh.seed_bits);
      PauliString w = mh.sample_w(seed);
      acc += accept_operator(
          w, [&](const BitVec& u) { return mh.accept(seed, u); });
    }
    acc /= double(count);
  }
  return MatrixC::Identity(dim, dim) - acc;
}

MatrixC dense_hamiltonian_sampled(const MeasurementHamiltonian& mh,
                                  int trials, Rng& rng) {
  require(mh.n <= kDenseQubitCap, "dense_hamiltonian_sampled: cap exceeded");
  Eigen::Index dim = dim_for_qubits(mh.n);
  MatrixC acc = MatrixC::Zero(dim, dim);
  for (int i = 0; i < trials; ++i) {
    BitVec seed = BitVec::random(mh.seed_bits, rng);
    PauliString w = mh.sample_w(seed);
    acc += accept_operator(
        w, [&](const BitVec& u) { return mh.accept(seed, u); });
  }
  acc /= double(trials);
  return MatrixC::Identity(dim, dim) - acc;
}

double ground_energy(const MatrixC& h) {
  Eigen::SelfAdjointEigenSolver<MatrixC> es(h);
  return es.eigenvalues()(0);
}

VectorC ground_state(const MatrixC& h) {
  Eigen::SelfAdjointEigenSolver<MatrixC> es(h);
  return es.eigenvectors().col(0);
}

// ----------------------------------------------------------- ksv_amplify

double ksv_amplified_accept(double p_block, int t, double alpha, double beta,
                            bool literal_threshold) {
  require(t >= 1, "ksv: t >= 1");
  // rejecting blocks r ~ Bin(t, 1 - p_block); accept iff r < cutoff
  double cutoff = literal_threshold
                      ? double(t) * (2.0 + alpha + beta) / 4.0
                      : double(t) * (alpha + beta) / 2.0;
  if (p_block <= 0.0) return double(t) < cutoff ? 1.0 : 0.0;
  if (p_block >= 1.0) return 0.0 < cutoff ? 1.0 : 0.0;
  long double q = 1.0L - (long double)p_block;
  long double p = (long double)p_block;
  long double term = powl(p, t);  // r = 0
  long double sum = 0;
  for (int r = 0; r < t + 1; ++r) {
    if (double(r) < cutoff) sum += term;
    term *= q / p * (long double)(t - r) / (long double)(r + 1);
    if (!std::isfinite(double(term))) {
      // fall back to direct log-space evaluation for extreme p
      sum = 0;
      for (int rr = 0; rr < t + 1; ++rr) {
        if (!(double(rr) < cutoff)) continue;
        long double lg = lgammal(t + 1.0L) - lgammal(rr + 1.0L) -
                         lgammal(t - rr + 1.0L) +
                         (long double)(t - rr) * logl(p) +
                         (long double)rr * logl(q);
        sum += expl(lg);
      }
      break;
    }
  }
  if (sum > 1.0L) sum = 1.0L;
  return double(sum);
}

MeasurementHamiltonian ksv_amplify(const MeasurementHamiltonian& mh, int t,
                                   bool literal_threshold) {
  require(t >= 1, "ksv_amplify: t >= 1");
  require(int64_t(t) * mh.n <= (int64_t{1} << 22),
          "ksv_amplify: t*n exceeds cap");
  MeasurementHamiltonian out;
  out.n = t * mh.n;
  out.seed_bits = t * mh.seed_bits;
  double a = mh.alpha, b = mh.beta;
  int base_bits = mh.seed_bits, base_n = mh.n;
  auto base_sample = mh.sample_w;
  auto base_accept = mh.accept;

  out.sample_w = [=](const BitVec& seed) {
    PauliString w;
    w.letters.reserve(size_t(t) * size_t(base_n));
    for (int i = 0; i < t; ++i) {
      PauliString wi = base_sample(seed.slice(i * base_bits, base_bits));
      w.letters.insert(w.letters.end(), wi.letters.begin(), wi.letters.end());
    }
    return w;
  };
  double cutoff = literal_threshold ? double(t) * (2.0 + a + b) / 4.0
                                    : double(t) * (a + b) / 2.0;
  out.accept = [=](const BitVec& seed, const BitVec& outcome) {
    require(outcome.bits == t * base_n, "ksv accept: outcome arity");
    int rejecting = 0;
    for (int i = 0; i < t; ++i) {
      BitVec si = seed.slice(i * base_bits, base_bits);
      BitVec ui = outcome.slice(i * base_n, base_n);
      if (!base_accept(si, ui)) ++rejecting;
    }
    return double(rejecting) < cutoff;
  };
  out.alpha = 1.0 - ksv_amplified_accept(1.0 - a, t, a, b, literal_threshold);
  out.beta = 1.0 - ksv_amplified_accept(1.0 - b, t, a, b, literal_threshold);

  // exact product terms when the blow-up stays tiny
  size_t combos = 1;
  bool feasible = !mh.exact_terms.empty();
  for (int i = 0; i < t && feasible; ++i) {
    combos *= mh.exact_terms.size();
    if (combos > 4096) feasible = false;
  }
  if (feasible) {
    std::vector<size_t> idx(size_t(t), 0);
    for (size_t c = 0; c < combos; ++c) {
      size_t rem = c;
      double weight = 1;
      PauliString w;
      std::vector<std::function<bool(const BitVec&)>> accepts;
      for (int i = 0; i < t; ++i) {
        size_t j = rem % mh.exact_terms.size();
        rem /= mh.exact_terms.size();
        const auto& term = mh.exact_terms[j];
        weight *= term.weight;
        w.letters.insert(w.letters.end(), term.w.letters.begin(),
                         term.w.letters.end());
        accepts.push_back(term.accept);
      }
      out.exact_terms.push_back(
          {weight, w, [accepts, base_n, cutoff](const BitVec& outcome) {
             int rejecting = 0;
             for (size_t i = 0; i < accepts.size(); ++i)
               if (!accepts[i](outcome.slice(int(i) * base_n, base_n)))
                 ++rejecting;
             return double(rejecting) < cutoff;
           }});
    }
  }

  nlohmann::json r;
  r["kind"] = "ksv";
  r["t"] = t;
  r["literal"] = literal_threshold;
  r["base"] = nlohmann::json::parse(mh.recipe.empty() ? "{}" : mh.recipe);
  out.recipe = r.dump();
  return out;
}

// ------------------------------------------------------------------- prg

BitVec prg_expand(const HashSpec& hash, const BitVec& seed, int out_len) {
  require(out_len >= 0 && out_len <= (1 << 20), "prg_expand: out_len cap");
  int leaves = std::max(1, (out_len + 255) / 256);
  std::vector<Bytes> level = {hash.digest2(0x10, seed.bytes, {})};
  while (int(level.size()) < leaves) {
    std::vector<Bytes> next;
    next.reserve(level.size() * 2);
    for (const auto& node : level) {
      next.push_back(hash.digest2(0x11, node, {0}));
      next.push_back(hash.digest2(0x11, node, {1}));
    }
    level.swap(next);
  }
  BitVec out = BitVec::zeros(out_len);
  int pos = 0;
  for (const auto& node : level) {
    Bytes leaf = hash.digest2(0x12, node, {});
    for (uint8_t byte : leaf) {
      for (int b = 0; b < 8 && pos < out_len; ++b, ++pos)
        out.set(pos, (byte >> b) & 1);
      if (pos >= out_len) break;
    }
    if (pos >= out_len) break;
  }
  return out;
}

Prg hash_prg(const HashSpec& hash, int seed_len, int out_len) {
  Prg p;
  p.seed_len = seed_len;
  p.out_len = out_len;
  p.expand = [hash, out_len, seed_len](const BitVec& seed) {
    require(seed.bits == seed_len, "prg: seed length mismatch");
    return prg_expand(hash, seed, out_len);
  };
  return p;
}

Prg identity_prg(int len) {
  Prg p;
  p.seed_len = len;
  p.out_len = len;
  p.expand = [len](const BitVec& seed) {
    require(seed.bits == len, "identity prg: seed length mismatch");
    return seed;
  };
  return p;
}

Prg constant_prg(int seed_len, const BitVec& value) {
  Prg p;
  p.seed_len = seed_len;
  p.out_len = value.bits;
  p.expand = [value](const BitVec&) { return value; };
  return p;
}

MeasurementHamiltonian prg_subsample(const MeasurementHamiltonian& mh,
                                     const Prg& prg) {
  require(prg.out_len >= mh.seed_bits, "prg_subsample: output too short");
  MeasurementHamiltonian out;
  out.n = mh.n;
  out.seed_bits = prg.seed_len;
  out.alpha = mh.alpha;
  out.beta = mh.beta;
  int base_bits = mh.seed_bits;
  auto base_sample = mh.sample_w;
  auto base_accept = mh.accept;
  auto expand = prg.expand;
  out.sample_w = [=](const BitVec& seed) {
    return base_sample(expand(seed).slice(0, base_bits));
  };
  out.accept = [=](const BitVec& seed, const BitVec& outcome) {
    return base_accept(expand(seed).slice(0, base_bits), outcome);
  };
  nlohmann::json r;
  r["kind"] = "prg";
  r["seed_len"] = prg.seed_len;
  r["out_len"] = prg.out_len;
  r["base"] = nlohmann::json::parse(mh.recipe.empty() ? "{}" : mh.recipe);
  out.recipe = r.dump();
  return out;
}

PauliString dprime_sample(const MeasurementHamiltonian& mh,
                          const BitVec& seed) {
  require(seed.bits >= mh.seed_bits + mh.n, "dprime_sample: seed underflow");
  PauliString w = mh.sample_w(seed.slice(0, mh.seed_bits));
  for (int i = 0; i < mh.n; ++i)
    if (!seed.get(mh.seed_bits + i)) w.letters[size_t(i)] = Letter::I;
  return w;
}

// ---------------------------------------------------------------- energy

namespace {

std::vector<int> all_qubits(int n) {
  std::vector<int> q(size_t(n), 0);
  for (int i = 0; i < n; ++i) q[size_t(i)] = i;
  return q;
}

double accept_prob_on_state(const QuantumState& s, const PauliString& w,
                            const std::function<bool(const BitVec&)>& accept) {
  double p = 0;
  for (auto& [u, branch] : measure_bases_branches(s, all_qubits(s.qubits), w))
    if (accept(BitVec::from_u64(u, s.qubits))) p += branch.norm2();
  return p;
}

}  // namespace

double exact_energy(const MeasurementHamiltonian& mh, const QuantumState& s) {
  require(s.qubits == mh.n, "exact_energy: dimension mismatch");
  if (!mh.exact_terms.empty()) {
    double acc = 0;
    for (const auto& t : mh.exact_terms)
      acc += t.weight * accept_prob_on_state(s, t.w, t.accept);
    return 1.0 - acc;
  }
  require(mh.seed_bits <= 20, "exact_energy: seed space too large");
  uint64_t count = uint64_t{1} << mh.seed_bits;
  double acc = 0;
  for (uint64_t v = 0; v < count; ++v) {
    BitVec seed = BitVec::from_u64(v, mh.seed_bits);
    PauliString w = mh.sample_w(seed);
    acc += accept_prob_on_state(
        s, w, [&](const BitVec& u) { return mh.accept(seed, u); });
  }
  return 1.0 - acc / double(count);
}

double exact_energy_density(const MeasurementHamiltonian& mh,
                            const MatrixC& rho) {
  MatrixC h = dense_hamiltonian(mh);
  require(h.rows() == rho.rows(), "exact_energy_density: dimension mismatch");
  return (h * rho).trace().real();
}

EnergyEstimate sampled_energy(const MeasurementHamiltonian& mh,
                              const QuantumState& s, int trials, Rng& rng) {
  require(s.qubits == mh.n, "sampled_energy: dimension mismatch");
  require(trials >= 2, "sampled_energy: need trials");
  int accepted = 0;
  for (int i = 0; i < trials; ++i) {
    BitVec seed = BitVec::random(mh.seed_bits, rng);
    PauliString w = mh.sample_w(seed);
    auto out = measure_bases(s, all_qubits(s.qubits), w, rng);
    if (mh.accept(seed, BitVec::from_u64(out.bits, mh.n))) ++accepted;
  }
  double p = double(accepted) / double(trials);
  EnergyEstimate e;
  e.value = 1.0 - p;
  e.stderr_ = std::sqrt(std::max(p * (1 - p), 1e-12) / double(trials));
  e.trials = trials;
  return e;
}

MeasurementHamiltonian mh_from_recipe(const std::string& recipe,
                                      const HashSpec& hash) {
  auto j = nlohmann::json::parse(recipe);
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "mf") {
    XZHamiltonian h = XZHamiltonian::from_json(j.at("xz").dump());
    return mf_convert(h, j.at("alpha_in").get<double>(),
                      j.at("beta_in").get<double>(),
                      j.at("term_bits").get<int>(),
                      j.at("coin_bits").get<int>());
  }
  if (kind == "ksv") {
    MeasurementHamiltonian base = mh_from_recipe(j.at("base").dump(), hash);
    return ksv_amplify(base, j.at("t").get<int>(), j.at("literal").get<bool>());
  }
  if (kind == "prg") {
    MeasurementHamiltonian base = mh_from_recipe(j.at("base").dump(), hash);
    return prg_subsample(
        base, hash_prg(hash, j.at("seed_len").get<int>(),
                       j.at("out_len").get<int>()));
  }
  throw Error("mh_from_recipe: unknown step kind " + kind);
}

}  // namespace qarg
