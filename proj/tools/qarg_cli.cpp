// Batch harness: build pipelines, run protocols, collect statistics, emit
// accounting and check reports as JSON.

#include <chrono>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qarg/compiler.hpp"
#include "qarg/normlab.hpp"
#include "qarg/report.hpp"
#include "qarg/stats.hpp"
#include "qarg/succinct.hpp"

namespace qarg {
namespace {

using nlohmann::json;

struct Harness {
  RunConfig cfg;
  HashSpec hash;
  MeasurementHamiltonian mh;
  BiasedSet set;
  QuantumState witness{1, VectorC::Ones(2).normalized()};

  static Harness make(const RunConfig& cfg) {
    require(cfg.n >= 2 && cfg.n <= 4,
            "protocol harness runs the toy instances, n in 2..4");
    Harness h;
    h.cfg = cfg;
    h.hash.key = Bytes(cfg.hash_key.begin(), cfg.hash_key.end());
    XZHamiltonian xz = toy_yes_instance(cfg.n <= 2 ? 0 : (cfg.n == 3 ? 1 : 2));
    double c = 0;
    for (auto& t : xz.terms) c += std::abs(t.coeff);
    h.mh = mf_convert(xz, -c, c, 4, 0);
    if (cfg.amp_t > 1)
      h.mh = ksv_amplify(h.mh, cfg.amp_t, cfg.literal_ksv_threshold);
    h.set = construct_biased(h.mh.n, cfg.bias_target);
    h.witness = QuantumState::from_amplitudes(
        h.mh.n, ground_state(dense_hamiltonian(h.mh)));
    return h;
  }
};

json run_trials(const Harness& h, bool compiled, bool zero_tables) {
  const RunConfig& cfg = h.cfg;
  Rng root(cfg.seed);
  std::map<std::string, std::pair<long, long>> counts;  // accepted, total
  auto qhe = cfg.enable_potp ? pauli_otp_qhe() : transparent_qhe();
  auto ctx = std::make_shared<HonestContext>(h.witness, h.mh, h.set);
  TwoProverStrategy strategy =
      zero_tables
          ? classical_strategy(constant_zero_table(h.mh.n),
                               constant_zero_table(h.mh.n))
          : honest_strategy(h.witness, h.mh, h.set);
  for (int i = 0; i < cfg.trials; ++i) {
    Rng rng = root.derive(uint64_t(i));
    bool verdict;
    std::string test;
    if (compiled) {
      auto prover = honest_compiled_prover(ctx, qhe);
      // the one-time-pad scheme evaluates parameter-independent circuits
      // only, so its runs stay on the teleportation branch
      QuestionPair forced;
      const QuestionPair* forcedp = nullptr;
      if (cfg.enable_potp) {
        forced = sample_hamiltonian_questions(h.mh, rng);
        forcedp = &forced;
      }
      auto t = compile_and_run(h.set, h.mh, *qhe, prover, cfg.secparam, rng,
                               forcedp);
      verdict = t.verdict;
      test = t.test_id;
    } else {
      auto t = run_main(strategy, h.set, h.mh, rng, cfg.strict_braiding);
      verdict = t.verdict;
      test = t.test_id;
    }
    auto& c = counts[test];
    c.first += verdict ? 1 : 0;
    c.second += 1;
  }
  json body;
  long total = 0;
  for (auto& [test, c] : counts) {
    body["counts"][test] = {{"accepted", c.first}, {"total", c.second}};
    total += c.second;
  }
  body["counts_total"] = total;
  // exact values at toy scale
  HonestContext ctx2(h.witness, h.mh, h.set);
  if (h.mh.n <= 3 && cfg.amp_t == 1) {
    body["exact"]["braiding"] = exact_braiding_accept(ctx2, cfg.strict_braiding);
    body["exact"]["mixed"] = exact_mixed_accept(ctx2);
    body["exact"]["hamiltonian"] = exact_hamiltonian_accept(ctx2);
    body["exact"]["ground_energy"] =
        ground_energy(dense_hamiltonian(h.mh));
  }
  auto oracle = magic_square_classical_oracle();
  body["magic_square"] = {{"classical_best", oracle.value()},
                          {"wins", oracle.best_wins},
                          {"pairs", oracle.pairs},
                          {"honest_quantum", h.mh.n <= 3 && cfg.amp_t == 1
                                                 ? exact_anticommutation_accept(ctx2)
                                                 : 1.0}};
  return body;
}

json run_succinct_cmd(const Harness& h, bool sweep) {
  const RunConfig& cfg = h.cfg;
  Rng root(cfg.seed);
  json body;
  auto qhe = transparent_qhe();
  if (!sweep) {
    SuccinctConfig scfg;
    scfg.secparam = cfg.secparam;
    scfg.k = cfg.k;
    scfg.hash = h.hash;
    auto ctx = std::make_shared<HonestContext>(h.witness, h.mh, h.set);
    long accepted = 0;
    uint64_t v2p = 0, p2v = 0;
    for (int i = 0; i < cfg.trials; ++i) {
      Rng rng = root.derive(uint64_t(i));
      auto prover =
          succinct_prover_from_compiled(honest_compiled_prover(ctx, qhe));
      auto t = run_succinct_protocol(h.set, h.mh, *qhe, prover, scfg, rng);
      accepted += t.verdict ? 1 : 0;
      v2p += t.verifier_to_prover_bytes;
      p2v += t.prover_to_verifier_bytes;
    }
    body["counts"]["main"] = {{"accepted", accepted}, {"total", cfg.trials}};
    body["counts_total"] = cfg.trials;
    body["bytes"] = {{"verifier_to_prover_mean", double(v2p) / cfg.trials},
                     {"prover_to_verifier_mean", double(p2v) / cfg.trials}};
    // yes/no separation through the amplified hamiltonian third
    double e_yes = ground_energy(dense_hamiltonian(h.mh));
    double yes_rate =
        ksv_amplified_accept(1.0 - e_yes, 60, h.mh.alpha, h.mh.beta,
                             cfg.literal_ksv_threshold);
    auto no_mh = toy_no_mh(h.mh.n);
    double no_rate = ksv_amplified_accept(1.0 - no_mh.beta, 60, no_mh.alpha,
                                          no_mh.beta,
                                          cfg.literal_ksv_threshold);
    body["separation_t60"] = {{"yes_accept", (2.0 + yes_rate) / 3.0},
                              {"no_accept", (2.0 + no_rate) / 3.0},
                              {"gap", (yes_rate - no_rate) / 3.0}};
    return body;
  }

  // accounting sweep: the hamiltonian branch at growing n with t = 4n,
  // wire shapes only (the prover answers zeros)
  std::vector<double> log2n, v2p_bytes;
  json rows = json::array();
  uint64_t total_1024 = 0, naive_1024 = 0;
  for (int n = 16; n <= 1024; n *= 2) {
    int t = 4 * n;
    XZHamiltonian xz;
    xz.n = n;
    for (int q = 0; q + 1 < n; q += 1)
      xz.terms.push_back({q % 3 == 0 ? -1.0 : 0.5,
                          {q, q + 1},
                          {q % 2 ? Letter::X : Letter::Z,
                           q % 2 ? Letter::X : Letter::Z}});
    auto base = mf_convert(xz, -double(xz.terms.size()),
                           double(xz.terms.size()), 8, 4);
    auto amplified = ksv_amplify(base, t, h.cfg.literal_ksv_threshold);
    int64_t full_seed_bits = amplified.seed_bits;
    auto sub = prg_subsample(
        amplified, hash_prg(h.hash, h.cfg.prg_seed_bits,
                            amplified.seed_bits));
    SuccinctConfig scfg;
    scfg.secparam = cfg.secparam;
    scfg.k = cfg.k;
    scfg.hash = h.hash;
    scfg.naive_seed_bits = full_seed_bits;
    Rng rng = root.derive(uint64_t(n));
    QuestionPair qp;
    qp.test_id = "hamiltonian";
    qp.alice = TeleQ{};
    qp.bob = MixedQ{BitVec::random(sub.seed_bits, rng)};
    BiasedSet dummy{sub.n, {0}, 1.0};
    auto prover = zero_answer_prover(sub.n, qhe->name());
    auto tr = run_succinct_protocol(dummy, sub, *qhe, prover, scfg, rng, &qp);
    uint64_t total = tr.verifier_to_prover_bytes + tr.prover_to_verifier_bytes;
    rows.push_back({{"n", n},
                    {"t", t},
                    {"verifier_to_prover", tr.verifier_to_prover_bytes},
                    {"prover_to_verifier", tr.prover_to_verifier_bytes},
                    {"total", total},
                    {"naive_baseline", tr.naive_baseline_bytes}});
    log2n.push_back(std::log2(double(n)));
    v2p_bytes.push_back(double(tr.verifier_to_prover_bytes));
    if (n == 1024) {
      total_1024 = total;
      naive_1024 = tr.naive_baseline_bytes;
    }
  }
  std::vector<double> reg;
  for (double l : log2n) reg.push_back(l * l);
  auto fit = fit_linear(reg, v2p_bytes);
  body["sweep"] = rows;
  body["fit_log2_squared"] = {{"a", fit.a}, {"b", fit.b}, {"r2", fit.r2}};
  body["naive_ratio_n1024"] = double(total_1024) / double(naive_1024);
  body["bytes"] = {{"total_n1024", total_1024},
                   {"naive_n1024", naive_1024}};
  return body;
}

json run_checks(const Harness& h, bool inject_failure, bool empty_suite) {
  const RunConfig& cfg = h.cfg;
  Rng rng(cfg.seed);
  std::vector<CheckRecord> records;
  if (!empty_suite) {
    {  // state-dependent norm: unitary invariance on a random instance
      MatrixC psi = random_density(6, rng);
      MatrixC a = random_binary_observable(6, rng);
      MatrixC u = random_unitary(6, rng);
      double lhs = state_norm(u * a, psi), rhs = state_norm(a, psi);
      records.push_back({"norm_unitary_invariance", "dim=6", lhs, rhs,
                         std::abs(lhs - rhs) < 1e-9});
    }
    {  // small-bias construction meets its target
      auto s = construct_biased(12, 0.3);
      double b = bias_of(s);
      records.push_back({"small_bias_target", "n=12 target=0.3", b, 0.3,
                         b <= 0.3});
    }
    {  // commutator lifting on one randomized instance
      auto S6 = construct_biased(6, 0.5);
      std::vector<uint64_t> chars;
      for (int i = 0; i < 8; ++i) chars.push_back(rng.next_u64() & 63);
      auto res = dls_check(random_binary_observable(8, rng),
                           diagonal_character_family(6, chars),
                           MatrixC::Identity(8, 8) / 8.0, S6, 0.0);
      records.push_back(
          {"dls_commutator", "n=6 dim=8", res.lhs, res.rhs, res.holds});
    }
    {  // rounding of the exact fundamental representation
      auto f = fundamental_rep(1);
      std::vector<double> mu(size_t(f.group.order()),
                             1.0 / f.group.order());
      auto rr = gh_round(f, MatrixC::Identity(2, 2) / 2.0, mu);
      records.push_back({"gh_round_exact", "W_1", rr.residual, 1e-8,
                         rr.residual <= 1e-8 && rr.implication_holds});
    }
    {  // mf conversion against the dense oracle on the configured instance
      double energy = ground_energy(dense_hamiltonian(h.mh));
      double via_state = exact_energy(h.mh, h.witness);
      records.push_back({"mf_energy_oracle", "toy instance", via_state,
                         energy, std::abs(via_state - energy) < 1e-9});
    }
    {  // parseval on a toy projective family
      auto w = PauliString::parse("XZ");
      auto fam = pauli_projector_family(w);
      auto res = parseval_check(fam, w, MatrixC::Identity(4, 4),
                                MatrixC::Identity(4, 4) / 4.0);
      records.push_back(
          {"parseval", "w=XZ", res.lhs, res.rhs, res.equal});
    }
  }
  if (inject_failure && !records.empty()) records.front().verdict = false;
  json body;
  body["checks"] = json::parse(check_records_to_json(records));
  int failed = 0;
  for (auto& r : records) failed += r.verdict ? 0 : 1;
  body["failed"] = failed;
  body["total"] = int(records.size());
  return body;
}

json run_ham_build(const RunConfig& cfg, const std::string& xz_path,
                   const std::string& out_path) {
  HashSpec hash{Bytes(cfg.hash_key.begin(), cfg.hash_key.end())};
  XZHamiltonian xz = XZHamiltonian::from_json(read_file(xz_path));
  double c = 0;
  for (auto& t : xz.terms) c += std::abs(t.coeff);
  auto mh = mf_convert(xz, -c, c);
  if (cfg.amp_t > 1) mh = ksv_amplify(mh, cfg.amp_t, cfg.literal_ksv_threshold);
  int64_t full_bits = mh.seed_bits;
  if (cfg.prg_seed_bits < mh.seed_bits)
    mh = prg_subsample(mh, hash_prg(hash, cfg.prg_seed_bits, mh.seed_bits));
  if (!out_path.empty()) write_file(out_path, mh.recipe);
  json body;
  body["n"] = mh.n;
  body["seed_bits"] = mh.seed_bits;
  body["full_seed_bits"] = full_bits;
  body["alpha"] = mh.alpha;
  body["beta"] = mh.beta;
  body["recipe_written"] = !out_path.empty();
  if (xz.n <= 8 && cfg.amp_t == 1) {
    auto base = mf_convert(xz, -c, c);
    body["ground_energy"] = ground_energy(dense_hamiltonian(base));
  }
  return body;
}

json run_bias_build(const RunConfig& cfg, const std::string& out_path) {
  auto s = construct_biased(cfg.n, cfg.bias_target);
  if (!out_path.empty()) write_file(out_path, s.export_lines());
  json body;
  body["n"] = s.n;
  body["size"] = s.size();
  body["target"] = s.target_bias;
  if (s.n <= 20) {
    double b = bias_of(s);
    body["measured_bias"] = b;
    body["meets_target"] = b <= s.target_bias;
  }
  body["size_constant"] =
      double(s.size()) * cfg.bias_target * cfg.bias_target /
      (double(cfg.n) * cfg.n);
  return body;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"desk-scale simulator for succinct quantum argument protocols"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path, out_path, xz_path, set_path;
  bool sweep = false, zero_tables = false, inject = false, empty_suite = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value config file");
    cmd->add_option("--seed", cfg.seed, "root seed");
    cmd->add_option("--n", cfg.n, "qubit count");
    cmd->add_option("--bias", cfg.bias_target, "small-bias target");
    cmd->add_option("--t", cfg.amp_t, "amplification repetitions");
    cmd->add_option("--secparam", cfg.secparam, "security parameter");
    cmd->add_option("--trials", cfg.trials, "trial count");
    cmd->add_option("--hash-key", cfg.hash_key, "keyed hash key");
    cmd->add_option("--k", cfg.k, "spot-check count");
    cmd->add_option("--prg-seed-bits", cfg.prg_seed_bits, "short seed bits");
    cmd->add_flag("--strict-braiding", cfg.strict_braiding,
                  "dispatch subtests by the actual parity");
    cmd->add_flag("--literal-ksv", cfg.literal_ksv_threshold,
                  "use the signed-sum amplification threshold");
    cmd->add_flag("--potp", cfg.enable_potp, "use the pauli-otp scheme");
    cmd->add_option("--out", out_path, "report output path");
  };

  auto* game = app.add_subcommand("game", "uncompiled two-prover runs");
  add_common(game);
  game->add_flag("--zero-tables", zero_tables,
                 "replace the honest prover with all-zero tables");
  auto* compiled = app.add_subcommand("compiled", "single-prover runs");
  add_common(compiled);
  auto* succinct = app.add_subcommand("succinct", "commit-and-open runs");
  add_common(succinct);
  succinct->add_flag("--accounting-sweep", sweep,
                     "byte accounting across n = 16..1024");
  std::string recipe_path;
  auto* ham = app.add_subcommand("ham-build", "build a sampler pipeline");
  add_common(ham);
  ham->add_option("--xz", xz_path, "X/Z Hamiltonian JSON file")->required();
  ham->add_option("--recipe-out", recipe_path, "pipeline recipe output");
  auto* bias = app.add_subcommand("bias-build", "construct a biased set");
  add_common(bias);
  bias->add_option("--set-out", set_path, "newline-delimited set output");
  auto* checks = app.add_subcommand("checks", "numerical check suite");
  add_common(checks);
  checks->add_flag("--inject-failure", inject,
                   "flip one verdict (harness self-test)");
  checks->add_flag("--empty-suite", empty_suite, "emit an empty report");

  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();
  if (!config_path.empty()) {
    // file values fill in whatever no flag set explicitly
    RunConfig file = RunConfig::from_file(config_path);
    auto keep = [&](const char* flag) { return sub->count(flag) > 0; };
    if (!keep("--seed")) cfg.seed = file.seed;
    if (!keep("--n")) cfg.n = file.n;
    if (!keep("--bias")) cfg.bias_target = file.bias_target;
    if (!keep("--t")) cfg.amp_t = file.amp_t;
    if (!keep("--secparam")) cfg.secparam = file.secparam;
    if (!keep("--trials")) cfg.trials = file.trials;
    if (!keep("--hash-key")) cfg.hash_key = file.hash_key;
    if (!keep("--k")) cfg.k = file.k;
    if (!keep("--prg-seed-bits")) cfg.prg_seed_bits = file.prg_seed_bits;
    if (!keep("--strict-braiding")) cfg.strict_braiding = file.strict_braiding;
    if (!keep("--literal-ksv"))
      cfg.literal_ksv_threshold = file.literal_ksv_threshold;
    if (!keep("--potp")) cfg.enable_potp = file.enable_potp;
  }
  cfg.validate();

  auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.config = cfg;
  try {
    if (*game) {
      report.command = "game";
      Harness h = Harness::make(cfg);
      json body = run_trials(h, false, zero_tables);
      report.body_json = body.dump();
      report.invariants_ok = true;
      if (body.contains("exact") && !zero_tables) {
        report.invariants_ok =
            std::abs(body["exact"]["braiding"].get<double>() - 1.0) < 1e-9 &&
            std::abs(body["exact"]["mixed"].get<double>() - 1.0) < 1e-9;
      }
    } else if (*compiled) {
      report.command = "compiled";
      Harness h = Harness::make(cfg);
      report.body_json = run_trials(h, true, false).dump();
    } else if (*succinct) {
      report.command = "succinct";
      Harness h = Harness::make(cfg);
      json body = run_succinct_cmd(h, sweep);
      report.body_json = body.dump();
      if (sweep)
        report.invariants_ok =
            body["fit_log2_squared"]["r2"].get<double>() >= 0.95 &&
            body["naive_ratio_n1024"].get<double>() < 0.01;
    } else if (*ham) {
      report.command = "ham-build";
      report.body_json = run_ham_build(cfg, xz_path, recipe_path).dump();
    } else if (*bias) {
      report.command = "bias-build";
      json body = run_bias_build(cfg, set_path);
      report.body_json = body.dump();
      if (body.contains("meets_target"))
        report.invariants_ok = body["meets_target"].get<bool>();
    } else if (*checks) {
      report.command = "checks";
      json body = run_checks(Harness::make(cfg), inject, empty_suite);
      report.body_json = body.dump();
      report.invariants_ok = body["failed"].get<int>() == 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  auto end = std::chrono::steady_clock::now();
  report.wall_clock_ms =
      std::chrono::duration<double, std::milli>(end - start).count();

  std::string json_text = report.to_json(true);
  std::string why;
  if (!validate_report_json(json_text, &why)) {
    std::cerr << "internal error: report failed schema validation: " << why
              << "\n";
    return 2;
  }
  if (out_path.empty()) {
    std::cout << json_text << "\n";
  } else {
    write_file(out_path, json_text);
    std::cout << (report.invariants_ok ? "ok" : "FAILED") << " "
              << report.command << " -> " << out_path << "\n";
  }
  return report.invariants_ok ? 0 : 1;
}

}  // namespace
}  // namespace qarg

int main(int argc, char** argv) { return qarg::cli_main(argc, argv); }
