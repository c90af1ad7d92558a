#pragma once

#include <string>

#include "qarg/hamiltonian.hpp"
#include "qarg/types.hpp"

namespace qarg {

// Batch-run parameters; CLI flags mirror these fields and a key = value
// config file can set any of them.
struct RunConfig {
  uint64_t seed = 1;
  int n = 2;
  double bias_target = 0.5;
  int amp_t = 1;
  int secparam = 64;
  int trials = 1000;
  std::string hash_key = "qarg-default-key";
  int k = 32;
  int prg_seed_bits = 32;
  bool strict_braiding = false;
  bool literal_ksv_threshold = false;
  bool enable_potp = false;

  void validate() const;
  std::string to_text() const;  // round-trip stable key = value form
  std::string to_json() const;
  static RunConfig from_text(const std::string& text);
  static RunConfig from_file(const std::string& path);
};

// Report body is JSON; this wrapper pins the top-level shape so reports
// can be validated against the published schema.
struct RunReport {
  std::string command;
  RunConfig config;
  std::string body_json = "{}";  // command-specific payload
  bool invariants_ok = true;
  double wall_clock_ms = 0;

  std::string to_json(bool include_wall_clock = true) const;
};

// Minimal structural validation against docs/report-schema.json: required
// keys with the right JSON types.
bool validate_report_json(const std::string& json, std::string* why = nullptr);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Shared toy instances for the harness: small X/Z Hamiltonians with exactly
// computable ground states.
XZHamiltonian toy_yes_instance(int which);
// sampler whose acceptance sets are empty off one rare draw, so every state
// has energy at least 0.9
MeasurementHamiltonian toy_no_mh(int n);

}  // namespace qarg
