#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "hepkit/error.hpp"

namespace hepkit {

/// One Gauss-Kronrod panel.
template <typename Scalar>
struct QuadratureEstimate {
  Scalar value{0};
  Scalar error{0};
  /// Kronrod estimate of the integral of |f|.
  Scalar abs_integral{0};
  /// 7-point Gauss estimate of the same panel.
  Scalar gauss{0};
};

namespace detail {

// Kronrod abscissae (positive half, descending) and weights; the odd entries
// and the centre are also the 7-point Gauss abscissae.
inline constexpr std::array<long double, 8> kKronrodX = {
    0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
    0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
    0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
    0.207784955007898467600689403773245L, 0.000000000000000000000000000000000L};
inline constexpr std::array<long double, 8> kKronrodW = {
    0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
    0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
    0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
    0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
inline constexpr std::array<long double, 4> kGaussW = {
    0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
    0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};

template <typename Scalar, typename F>
Scalar checked_eval(F& f, Scalar x) {
  const Scalar v = static_cast<Scalar>(f(x));
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os.precision(17);
    os << "integrand is not finite at x = " << x;
    throw IntegrationError(os.str());
  }
  return v;
}

}  // namespace detail

/// G7/K15 pair on [a, b]. The error uses the usual scaled-difference
/// heuristic, err = I_asc * min(1, (200 |K15 - G7| / I_asc)^1.5), floored at
/// 50 eps times the integral of |f|.
template <typename Scalar, typename F>
QuadratureEstimate<Scalar> gauss_kronrod15(F&& f, Scalar a, Scalar b) {
  using detail::kGaussW;
  using detail::kKronrodW;
  using detail::kKronrodX;
  const Scalar centre = (a + b) / 2;
  const Scalar half = (b - a) / 2;
  const Scalar abs_half = std::abs(half);

  const Scalar fc = detail::checked_eval(f, centre);
  Scalar res_g = fc * Scalar(kGaussW[3]);
  Scalar res_k = fc * Scalar(kKronrodW[7]);
  Scalar res_abs = std::abs(res_k);
  std::array<Scalar, 7> f1{}, f2{};
  for (std::size_t j = 0; j < 7; ++j) {
    const Scalar dx = half * Scalar(kKronrodX[j]);
    f1[j] = detail::checked_eval(f, centre - dx);
    f2[j] = detail::checked_eval(f, centre + dx);
    const Scalar sum = f1[j] + f2[j];
    res_k += Scalar(kKronrodW[j]) * sum;
    res_abs += Scalar(kKronrodW[j]) * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) res_g += Scalar(kGaussW[j / 2]) * sum;
  }
  const Scalar mean = res_k / 2;
  Scalar res_asc = Scalar(kKronrodW[7]) * std::abs(fc - mean);
  for (std::size_t j = 0; j < 7; ++j)
    res_asc += Scalar(kKronrodW[j]) * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  QuadratureEstimate<Scalar> out;
  out.value = res_k * half;
  out.gauss = res_g * half;
  out.abs_integral = res_abs * abs_half;
  res_asc *= abs_half;
  Scalar err = std::abs((res_k - res_g) * half);
  if (res_asc != 0 && err != 0) err = res_asc * std::min(Scalar(1), std::pow(200 * err / res_asc, Scalar(1.5)));
  constexpr Scalar eps = std::numeric_limits<Scalar>::epsilon();
  constexpr Scalar tiny = std::numeric_limits<Scalar>::min();
  if (out.abs_integral > tiny / (50 * eps)) err = std::max(50 * eps * out.abs_integral, err);
  out.error = err;
  return out;
}

template <typename Scalar>
struct AdaptiveQuadrature {
  Scalar value{0};
  Scalar error{0};
  std::size_t intervals = 0;
  bool converged = false;
};

/// Globally adaptive bisection: splits the panel with the largest error
/// until the summed error is at most rel_tol |value| or max_intervals
/// panels exist.
template <typename Scalar, typename F>
AdaptiveQuadrature<Scalar> gauss_kronrod_adaptive(F&& f, Scalar a, Scalar b, Scalar rel_tol,
                                                  std::size_t max_intervals) {
  struct Panel {
    Scalar a, b;
    QuadratureEstimate<Scalar> est;
    bool operator<(const Panel& o) const { return est.error < o.est.error; }
  };
  std::priority_queue<Panel> heap;
  heap.push({a, b, gauss_kronrod15<Scalar>(f, a, b)});
  Scalar value = heap.top().est.value;
  Scalar error = heap.top().est.error;

  AdaptiveQuadrature<Scalar> out;
  while (error > rel_tol * std::abs(value) && heap.size() < max_intervals) {
    const Panel worst = heap.top();
    heap.pop();
    const Scalar mid = (worst.a + worst.b) / 2;
    if (!(worst.a < mid && mid < worst.b)) {
      heap.push(worst);
      break;  // panel no longer splittable in this precision
    }
    Panel left{worst.a, mid, gauss_kronrod15<Scalar>(f, worst.a, mid)};
    Panel right{mid, worst.b, gauss_kronrod15<Scalar>(f, mid, worst.b)};
    heap.push(left);
    heap.push(right);
    // Re-sum rather than update incrementally to avoid drift.
    auto copy = heap;
    value = 0;
    error = 0;
    while (!copy.empty()) {
      value += copy.top().est.value;
      error += copy.top().est.error;
      copy.pop();
    }
  }
  out.value = value;
  out.error = error;
  out.intervals = heap.size();
  out.converged = error <= rel_tol * std::abs(value);
  return out;
}

}  // namespace hepkit
