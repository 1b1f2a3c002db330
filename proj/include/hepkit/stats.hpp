#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hepkit {

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// P(chi2 >= x) for `dof` degrees of freedom.
double chi2_survival(double x, double dof);

/// Asymptotic Kolmogorov distribution tail for statistic d with effective
/// sample size n, using the Stephens small-sample correction.
double kolmogorov_pvalue(double d, double n_effective);

struct KsResult {
  double statistic = 0;
  double n_effective = 0;
  double p_value = 1;
};

/// Two-sample Kolmogorov-Smirnov test on weighted samples. Each sample's
/// effective size is (sum w)^2 / sum w^2. Negative weights are allowed; the
/// empirical CDFs are then not monotone but the statistic is still the
/// largest gap.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> wa, std::span<const double> b,
                       std::span<const double> wb);

/// Fixed-binning weighted histogram over [lo, hi); entries outside are
/// dropped.
struct Histogram {
  double lo = 0;
  double hi = 1;
  std::vector<double> sum_w;
  std::vector<double> sum_w2;

  Histogram(std::size_t bins, double lo, double hi);
  void fill(double x, double w = 1.0);
  std::size_t bins() const noexcept { return sum_w.size(); }
  double bin_lower(std::size_t b) const;
  double bin_width() const noexcept { return (hi - lo) / static_cast<double>(bins()); }
};

}  // namespace hepkit
