#include <doctest.h>

#include "qarg/report.hpp"
#include "qarg/stats.hpp"

using namespace qarg;

TEST_CASE("config text round trip is stable") {
  RunConfig cfg;
  cfg.seed = 77;
  cfg.n = 3;
  cfg.bias_target = 0.25;
  cfg.amp_t = 4;
  cfg.trials = 123;
  cfg.strict_braiding = true;
  auto text = cfg.to_text();
  auto back = RunConfig::from_text(text);
  CHECK(back.to_text() == text);
  CHECK(back.seed == 77);
  CHECK(back.strict_braiding);
}

TEST_CASE("config parser accepts comments and rejects junk") {
  CHECK_NOTHROW(RunConfig::from_text("# comment\n[run]\nseed = 5\n"));
  CHECK_THROWS_AS(RunConfig::from_text("unrecognized = 1\n"), Error);
  CHECK_THROWS_AS(RunConfig::from_text("n = 99\n"), Error);
}

TEST_CASE("report json validates against the published shape") {
  RunReport r;
  r.command = "checks";
  r.body_json = "{\"checks\": []}";
  std::string json = r.to_json(true);
  std::string why;
  CHECK(validate_report_json(json, &why));
  CHECK(!validate_report_json("{}", &why));
  CHECK(!validate_report_json("not json", &why));
  // wall clock lives under meta and can be dropped for replay comparison
  CHECK(r.to_json(false) == r.to_json(false));
}

TEST_CASE("toy instances have computable ground states") {
  for (int which : {0, 1, 2}) {
    auto xz = toy_yes_instance(which);
    double c = 0;
    for (auto& t : xz.terms) c += std::abs(t.coeff);
    auto mh = mf_convert(xz, -c, c);
    double e = ground_energy(dense_hamiltonian(mh));
    CHECK(e >= 0.0);
    CHECK(e < 0.5);  // yes instances sit well below the midpoint
  }
}

TEST_CASE("toy no instance has high energy for every state") {
  auto mh = toy_no_mh(2);
  double e = ground_energy(dense_hamiltonian(mh));
  CHECK(e >= 0.9375 - 1e-12);  // 1 - 1/16
}

TEST_CASE("chi-square p-values behave") {
  CHECK(chi2_pvalue(0.0, 5) == doctest::Approx(1.0));
  CHECK(chi2_pvalue(100.0, 5) < 1e-6);
  // median of chi2 with 2 dof is about 1.386
  CHECK(chi2_pvalue(1.386, 2) == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("linear fit recovers a planted line") {
  std::vector<double> x{1, 2, 3, 4, 5}, y;
  for (double v : x) y.push_back(3.0 * v + 1.0);
  auto fit = fit_linear(x, y);
  CHECK(fit.a == doctest::Approx(3.0));
  CHECK(fit.b == doctest::Approx(1.0));
  CHECK(fit.r2 == doctest::Approx(1.0));
}
