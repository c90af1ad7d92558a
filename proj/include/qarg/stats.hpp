#pragma once

#include <map>
#include <string>
#include <vector>

namespace qarg {

// regularized upper incomplete gamma Q(a, x)
double gamma_q(double a, double x);

// p-value of a chi-square statistic with `dof` degrees of freedom
double chi2_pvalue(double statistic, int dof);

// Pearson chi-square test of observed counts against expected probabilities
// (keys must match; tiny expected cells are pooled).
struct Chi2Result {
  double statistic = 0;
  int dof = 0;
  double pvalue = 1;
};
Chi2Result chi2_test(const std::map<std::string, long>& observed,
                     const std::map<std::string, double>& expected_probs,
                     long total);

// least squares y ~ a * f(x) + b
struct LinearFit {
  double a = 0, b = 0, r2 = 0;
};
LinearFit fit_linear(const std::vector<double>& f,
                     const std::vector<double>& y);

}  // namespace qarg
