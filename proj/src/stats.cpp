#include "hepkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hepkit {

namespace {

// Series for P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0) || x < 0) throw std::invalid_argument("gamma_q: need a > 0 and x >= 0");
  if (x == 0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chi2_survival(double x, double dof) { return gamma_q(0.5 * dof, 0.5 * std::max(x, 0.0)); }

double kolmogorov_pvalue(double d, double n_effective) {
  if (!(n_effective > 0)) return 1.0;
  const double sn = std::sqrt(n_effective);
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0;
  double sign = 1;
  for (int j = 1; j <= 100; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> wa, std::span<const double> b,
                       std::span<const double> wb) {
  if (a.size() != wa.size() || b.size() != wb.size()) throw std::invalid_argument("ks_two_sample: size mismatch");
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");

  auto order = [](std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    return idx;
  };
  auto totals = [](std::span<const double> w) {
    double s = 0, s2 = 0;
    for (double x : w) {
      s += x;
      s2 += x * x;
    }
    return std::pair{s, s2};
  };
  const auto [sa, sa2] = totals(wa);
  const auto [sb, sb2] = totals(wb);
  if (sa == 0 || sb == 0) throw std::invalid_argument("ks_two_sample: zero total weight");

  const auto ia = order(a);
  const auto ib = order(b);
  double ca = 0, cb = 0, dmax = 0;
  std::size_t i = 0, j = 0;
  while (i < ia.size() || j < ib.size()) {
    double x;
    if (j == ib.size() || (i < ia.size() && a[ia[i]] <= b[ib[j]]))
      x = a[ia[i]];
    else
      x = b[ib[j]];
    while (i < ia.size() && a[ia[i]] == x) ca += wa[ia[i++]];
    while (j < ib.size() && b[ib[j]] == x) cb += wb[ib[j++]];
    dmax = std::max(dmax, std::abs(ca / sa - cb / sb));
  }

  const double na = sa * sa / sa2;
  const double nb = sb * sb / sb2;
  KsResult r;
  r.statistic = dmax;
  r.n_effective = na * nb / (na + nb);
  r.p_value = kolmogorov_pvalue(dmax, r.n_effective);
  return r;
}

Histogram::Histogram(std::size_t bins, double lo_, double hi_) : lo(lo_), hi(hi_), sum_w(bins), sum_w2(bins) {
  if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
  if (!(lo_ < hi_) || !std::isfinite(lo_) || !std::isfinite(hi_))
    throw std::invalid_argument("histogram range must be finite with lo < hi");
}

void Histogram::fill(double x, double w) {
  if (!(x >= lo && x < hi)) return;
  auto b = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins()));
  b = std::min(b, bins() - 1);
  sum_w[b] += w;
  sum_w2[b] += w * w;
}

double Histogram::bin_lower(std::size_t b) const {
  return lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins());
}

}  // namespace hepkit
