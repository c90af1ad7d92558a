#include "qarg/stats.hpp"

#include <cmath>

#include "qarg/types.hpp"

namespace qarg {

namespace {

// series expansion of P(a,x), valid for x < a+1
double gamma_p_series(double a, double x) {
  double sum = 1.0 / a, term = sum, ap = a;
  for (int i = 0; i < 500; ++i) {
    ap += 1;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a,x), valid for x >= a+1
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
  require(a > 0 && x >= 0, "gamma_q: domain");
  if (x == 0) return 1.0;
  if (x < a + 1) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi2_pvalue(double statistic, int dof) {
  if (dof <= 0) return 1.0;
  return gamma_q(double(dof) / 2.0, statistic / 2.0);
}

Chi2Result chi2_test(const std::map<std::string, long>& observed,
                     const std::map<std::string, double>& expected_probs,
                     long total) {
  Chi2Result r;
  double stat = 0;
  int cells = 0;
  double pooled_exp = 0;
  long pooled_obs = 0;
  for (const auto& [key, p] : expected_probs) {
    double e = p * double(total);
    long o = 0;
    if (auto it = observed.find(key); it != observed.end()) o = it->second;
    if (e < 5.0) {  // pool sparse cells
      pooled_exp += e;
      pooled_obs += o;
      continue;
    }
    stat += (double(o) - e) * (double(o) - e) / e;
    ++cells;
  }
  if (pooled_exp > 0) {
    stat += (double(pooled_obs) - pooled_exp) * (double(pooled_obs) - pooled_exp) /
            pooled_exp;
    ++cells;
  }
  r.statistic = stat;
  r.dof = cells > 1 ? cells - 1 : 1;
  r.pvalue = chi2_pvalue(stat, r.dof);
  return r;
}

LinearFit fit_linear(const std::vector<double>& f,
                     const std::vector<double>& y) {
  require(f.size() == y.size() && f.size() >= 2, "fit_linear: bad input");
  double n = double(f.size());
  double sf = 0, sy = 0, sff = 0, sfy = 0;
  for (size_t i = 0; i < f.size(); ++i) {
    sf += f[i];
    sy += y[i];
    sff += f[i] * f[i];
    sfy += f[i] * y[i];
  }
  LinearFit fit;
  double denom = n * sff - sf * sf;
  require(std::abs(denom) > 1e-12, "fit_linear: degenerate regressor");
  fit.a = (n * sfy - sf * sy) / denom;
  fit.b = (sy - fit.a * sf) / n;
  double ss_res = 0, ss_tot = 0, mean = sy / n;
  for (size_t i = 0; i < f.size(); ++i) {
    double pred = fit.a * f[i] + fit.b;
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace qarg
