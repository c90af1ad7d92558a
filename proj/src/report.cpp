#include "qarg/report.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qarg {

void RunConfig::validate() const {
  require(n >= 1 && n <= 24, "config: n out of range");
  require(bias_target > 0 && bias_target < 1 + 1e-12, "config: bias target");
  require(amp_t >= 1, "config: amplification t");
  require(secparam >= 8 && secparam <= 4096, "config: secparam");
  require(trials >= 1, "config: trials");
  require(k >= 1 && k <= 1024, "config: spot checks");
  require(prg_seed_bits >= 8 && prg_seed_bits <= 64, "config: prg seed bits");
  require(!hash_key.empty(), "config: hash key");
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  os << "[run]\n";
  os << "seed = " << seed << "\n";
  os << "n = " << n << "\n";
  os << "bias_target = " << bias_target << "\n";
  os << "amp_t = " << amp_t << "\n";
  os << "secparam = " << secparam << "\n";
  os << "trials = " << trials << "\n";
  os << "hash_key = " << hash_key << "\n";
  os << "k = " << k << "\n";
  os << "prg_seed_bits = " << prg_seed_bits << "\n";
  os << "strict_braiding = " << (strict_braiding ? 1 : 0) << "\n";
  os << "literal_ksv_threshold = " << (literal_ksv_threshold ? 1 : 0) << "\n";
  os << "enable_potp = " << (enable_potp ? 1 : 0) << "\n";
  return os.str();
}

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto ltrim = line.find_first_not_of(" \t\r");
    if (ltrim == std::string::npos) continue;
    if (line[ltrim] == '[') continue;  // section headers are cosmetic
    size_t eq = line.find('=');
    require(eq != std::string::npos, "config: expected key = value");
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "seed")
      cfg.seed = std::stoull(value);
    else if (key == "n")
      cfg.n = std::stoi(value);
    else if (key == "bias_target")
      cfg.bias_target = std::stod(value);
    else if (key == "amp_t")
      cfg.amp_t = std::stoi(value);
    else if (key == "secparam")
      cfg.secparam = std::stoi(value);
    else if (key == "trials")
      cfg.trials = std::stoi(value);
    else if (key == "hash_key")
      cfg.hash_key = value;
    else if (key == "k")
      cfg.k = std::stoi(value);
    else if (key == "prg_seed_bits")
      cfg.prg_seed_bits = std::stoi(value);
    else if (key == "strict_braiding")
      cfg.strict_braiding = value != "0";
    else if (key == "literal_ksv_threshold")
      cfg.literal_ksv_threshold = value != "0";
    else if (key == "enable_potp")
      cfg.enable_potp = value != "0";
    else
      throw Error("config: unknown key " + key);
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  return from_text(read_file(path));
}

std::string RunConfig::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["n"] = n;
  j["bias_target"] = bias_target;
  j["amp_t"] = amp_t;
  j["secparam"] = secparam;
  j["trials"] = trials;
  j["hash_key"] = hash_key;
  j["k"] = k;
  j["prg_seed_bits"] = prg_seed_bits;
  j["strict_braiding"] = strict_braiding;
  j["literal_ksv_threshold"] = literal_ksv_threshold;
  j["enable_potp"] = enable_potp;
  return j.dump();
}

std::string RunReport::to_json(bool include_wall_clock) const {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = nlohmann::json::parse(config.to_json());
  j["body"] = nlohmann::json::parse(body_json);
  j["invariants_ok"] = invariants_ok;
  if (include_wall_clock) j["meta"] = {{"wall_clock_ms", wall_clock_ms}};
  return j.dump(2);
}

bool validate_report_json(const std::string& json, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const std::exception& e) {
    return fail(std::string("parse: ") + e.what());
  }
  if (!j.is_object()) return fail("top level must be an object");
  if (!j.contains("command") || !j["command"].is_string())
    return fail("missing string field: command");
  if (!j.contains("config") || !j["config"].is_object())
    return fail("missing object field: config");
  for (const char* key : {"seed", "n", "trials", "k"})
    if (!j["config"].contains(key) || !j["config"][key].is_number())
      return fail(std::string("config missing numeric field: ") + key);
  if (!j.contains("body") || !j["body"].is_object())
    return fail("missing object field: body");
  if (!j.contains("invariants_ok") || !j["invariants_ok"].is_boolean())
    return fail("missing boolean field: invariants_ok");
  return true;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot write " + path);
  out << content;
}

XZHamiltonian toy_yes_instance(int which) {
  XZHamiltonian h;
  switch (which) {
    case 0:  // two-qubit Ising link with a transverse kick
      h.n = 2;
      h.terms.push_back({-1.0, {0, 1}, {Letter::Z, Letter::Z}});
      h.terms.push_back({-0.5, {0}, {Letter::X}});
      break;
    case 1:  // three qubits, mixed couplings
      h.n = 3;
      h.terms.push_back({-1.0, {0, 1}, {Letter::Z, Letter::Z}});
      h.terms.push_back({-0.75, {1, 2}, {Letter::X, Letter::X}});
      h.terms.push_back({0.25, {2}, {Letter::Z}});
      break;
    default:  // four qubits, a short frustrated chain
      h.n = 4;
      h.terms.push_back({-1.0, {0, 1}, {Letter::Z, Letter::Z}});
      h.terms.push_back({-1.0, {1, 2}, {Letter::Z, Letter::Z}});
      h.terms.push_back({0.5, {2, 3}, {Letter::X, Letter::X}});
      h.terms.push_back({-0.5, {0}, {Letter::X}});
      h.terms.push_back({0.25, {3}, {Letter::Z}});
      break;
  }
  return h;
}

MeasurementHamiltonian toy_no_mh(int n) {
  MeasurementHamiltonian mh;
  mh.n = n;
  mh.seed_bits = 4;
  mh.alpha = 0.05;
  mh.beta = 0.9;
  mh.sample_w = [n](const BitVec& seed) {
    // one draw in sixteen measures all-Z; the rest land in empty sets
    return PauliString::uniform(
        seed.to_u64() == 0 ? Letter::Z : Letter::X, n);
  };
  mh.accept = [](const BitVec& seed, const BitVec&) {
    return seed.to_u64() == 0;
  };
  return mh;
}

}  // namespace qarg
