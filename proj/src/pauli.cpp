#include "qarg/pauli.hpp"

#include <nlohmann/json.hpp>

namespace qarg {

PauliString PauliString::parse(const std::string& s) {
  PauliString w;
  w.letters.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case 'I': w.letters.push_back(Letter::I); break;
      case 'X': w.letters.push_back(Letter::X); break;
      case 'Z': w.letters.push_back(Letter::Z); break;
      default: throw Error("PauliString::parse: bad letter");
    }
  }
  require(!w.letters.empty(), "PauliString: empty");
  return w;
}

PauliString PauliString::uniform(Letter l, int n) {
  require(n >= 1, "PauliString: n >= 1");
  PauliString w;
  w.letters.assign(size_t(n), l);
  return w;
}

std::string PauliString::str() const {
  std::string s;
  for (Letter l : letters)
    s.push_back(l == Letter::I ? 'I' : (l == Letter::X ? 'X' : 'Z'));
  return s;
}

PauliWord sigma_w(const PauliString& w, uint64_t a) {
  int n = w.size();
  require(n >= 1 && n <= 64, "sigma_w: bad length");
  require(n == 64 || (a >> n) == 0, "sigma_w: mask longer than string");
  PauliWord p = PauliWord::identity(n);
  for (int i = 0; i < n; ++i) {
    if (!((a >> i) & 1)) continue;
    if (w[i] == Letter::X) p.xmask |= uint64_t{1} << i;
    if (w[i] == Letter::Z) p.zmask |= uint64_t{1} << i;
  }
  return p;
}

PauliWord word_mul(const PauliWord& p, const PauliWord& q) {
  require(p.n == q.n, "word_mul: length mismatch");
  PauliWord r;
  r.n = p.n;
  // sigma_Z(b) sigma_X(c) = (-1)^{b.c} sigma_X(c) sigma_Z(b)
  int sign = parity64(p.zmask & q.xmask);
  r.phase = int8_t(p.phase * q.phase * (sign ? -1 : +1));
  r.xmask = p.xmask ^ q.xmask;
  r.zmask = p.zmask ^ q.zmask;
  return r;
}

MatrixC pauli_matrix(Letter l) {
  MatrixC m(2, 2);
  switch (l) {
    case Letter::I: m << 1, 0, 0, 1; break;
    case Letter::X: m << 0, 1, 1, 0; break;
    case Letter::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

MatrixC word_to_dense(const PauliWord& p) {
  require(p.n <= kDenseQubitCap, "word_to_dense: dense cap exceeded");
  Eigen::Index dim = dim_for_qubits(p.n);
  MatrixC m = MatrixC::Zero(dim, dim);
  // Row r maps from column c = r ^ xmask_rev with sign (-1)^{zmask . c}.
  // Qubit i is amplitude bit (n-1-i).
  uint64_t xrev = 0, zrev = 0;
  for (int i = 0; i < p.n; ++i) {
    if ((p.xmask >> i) & 1) xrev |= uint64_t{1} << (p.n - 1 - i);
    if ((p.zmask >> i) & 1) zrev |= uint64_t{1} << (p.n - 1 - i);
  }
  for (Eigen::Index c = 0; c < dim; ++c) {
    Eigen::Index r = Eigen::Index(uint64_t(c) ^ xrev);
    double s = parity64(uint64_t(c) & zrev) ? -1.0 : 1.0;
    m(r, c) = double(p.phase) * s;
  }
  return m;
}

MatrixC pauli_projector(const PauliString& w, uint64_t u) {
  int n = w.size();
  require(n <= kDenseQubitCap, "pauli_projector: dense cap exceeded");
  // build right-to-left so qubit 0 ends up the leftmost factor
  MatrixC m = MatrixC::Ones(1, 1);
  for (int i = n - 1; i >= 0; --i) {
    double s = ((u >> i) & 1) ? -1.0 : 1.0;
    MatrixC f = (MatrixC::Identity(2, 2) + s * pauli_matrix(w[i])) / 2.0;
    MatrixC next(m.rows() * 2, m.cols() * 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        next.block(a * m.rows(), b * m.cols(), m.rows(), m.cols()) =
            f(a, b) * m;
    m.swap(next);
  }
  return m;
}

std::vector<MatrixC> pauli_projector_family(const PauliString& w) {
  int n = w.size();
  require(n <= kDenseQubitCap, "pauli_projector_family: dense cap exceeded");
  std::vector<MatrixC> fam;
  fam.reserve(size_t(1) << n);
  for (uint64_t u = 0; u < (uint64_t{1} << n); ++u)
    fam.push_back(pauli_projector(w, u));
  return fam;
}

std::map<uint64_t, MatrixC> reduce_measurement(
    const std::map<uint64_t, MatrixC>& family, int n,
    const std::vector<int>& S) {
  require(!S.empty(), "reduce_measurement: empty index set");
  require(!family.empty(), "reduce_measurement: empty family");
  for (int i : S) require(i >= 0 && i < n, "reduce_measurement: bad index");
  Eigen::Index dim = family.begin()->second.rows();
  MatrixC total = MatrixC::Zero(dim, dim);
  for (const auto& [u, q] : family) total += q;
  require((total - MatrixC::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-8,
          "reduce_measurement: input family does not sum to identity");
  std::map<uint64_t, MatrixC> out;
  for (const auto& [u, q] : family) {
    uint64_t v = 0;
    for (size_t k = 0; k < S.size(); ++k)
      if ((u >> S[k]) & 1) v |= uint64_t{1} << k;
    auto it = out.find(v);
    if (it == out.end())
      out.emplace(v, q);
    else
      it->second += q;
  }
  return out;
}

std::string word_to_json(const PauliWord& p) {
  nlohmann::json j;
  j["sign"] = int(p.phase);
  j["xmask"] = to_hex_u64(p.xmask);
  j["zmask"] = to_hex_u64(p.zmask);
  j["n"] = p.n;
  return j.dump();
}

PauliWord word_from_json(const std::string& json) {
  auto j = nlohmann::json::parse(json);
  PauliWord p;
  p.n = j.at("n").get<int>();
  p.phase = int8_t(j.at("sign").get<int>());
  require(p.phase == 1 || p.phase == -1, "word_from_json: sign");
  p.xmask = std::stoull(j.at("xmask").get<std::string>(), nullptr, 16);
  p.zmask = std::stoull(j.at("zmask").get<std::string>(), nullptr, 16);
  return p;
}

}  // namespace qarg
