#include <doctest.h>

#include <cmath>
#include <cstring>

#include "hepkit/error.hpp"
#include "hepkit/integration.hpp"
#include "hepkit/quadrature.hpp"

using namespace hepkit;

namespace {

Expr fn(double (*f)(double)) {
  return wrap_closure([f](std::span<const double> x) { return f(x[0]); });
}

}  // namespace

TEST_CASE("gk15 integrates polynomials up to degree 13 exactly") {
  for (int k = 0; k <= 13; ++k) {
    const Expr f = wrap_closure([k](std::span<const double> x) { return std::pow(x[0], k); });
    const auto r = gk15_static(f, 0.0, 1.0);
    CHECK(std::abs(r.value - 1.0 / (k + 1)) < 1e-13);
    CHECK(r.calls_used == 15);
  }
}

TEST_CASE("templated gauss-kronrod works in long double") {
  const auto r = gauss_kronrod15<long double>([](long double x) { return x * x; }, 0.0L, 3.0L);
  CHECK(static_cast<double>(r.value) == doctest::Approx(9.0).epsilon(1e-16));
}

TEST_CASE("adaptive gk on an endpoint singularity") {
  const Expr f = fn([](double x) { return std::sqrt(x); });
  const auto r = gk_adaptive(f, 0.0, 1.0, 1e-12, 1000);
  CHECK(r.converged);
  CHECK(std::abs(r.value - 2.0 / 3.0) < 1e-9);
  CHECK(r.error < 1e-9);
}

TEST_CASE("adaptive gk reports an exhausted budget") {
  const Expr f = fn([](double x) { return std::sin(1.0 / (x + 1e-3)); });
  const auto r = gk_adaptive(f, 0.0, 1.0, 1e-14, 3);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
}

TEST_CASE("non-finite integrands are errors") {
  const Expr f = fn([](double x) { return 1.0 / x; });
  CHECK_THROWS_AS(gk15_static(f, -1.0, 1.0), IntegrationError);
}

TEST_CASE("plain MC of a constant has zero error") {
  const auto r = plain_mc(constant(2.0, 3), BoundedRegion::cube(3, 0.0, 2.0), 1000, RngKey{1, 0, 0});
  CHECK(r.value == doctest::Approx(16.0).epsilon(1e-15));
  CHECK(r.error == doctest::Approx(0.0));
}

TEST_CASE("vegas on f = 1 returns the volume exactly") {
  VegasConfig c;
  c.calls_per_iteration = 2000;
  c.iterations = 4;
  c.bins = 20;
  const auto out = vegas(constant(1.0, 2), BoundedRegion{{0.0, 2.0}, {-1.0, 0.5}}, c, RngKey{9, 0, 0});
  CHECK(out.result.value == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(out.result.error < 1e-12);
}

TEST_CASE("vegas on a peaked 3-d gaussian") {
  const Expr f = wrap_closure(
      [](std::span<const double> x) {
        double s = 0;
        for (double v : x) s += (v - 0.5) * (v - 0.5);
        return std::exp(-s / (2 * 0.05 * 0.05));
      },
      3);
  const double truth = std::pow(0.05 * std::sqrt(2 * M_PI) * std::erf(0.5 / (0.05 * std::sqrt(2.0))), 3);
  VegasConfig c;
  c.calls_per_iteration = 20'000;
  c.iterations = 8;
  const auto out = vegas(f, BoundedRegion::cube(3, 0.0, 1.0), c, RngKey{4, 0, 0});
  CHECK(std::abs(out.result.value - truth) < 4 * out.result.error);
  CHECK(out.result.error / truth < 0.01);
  CHECK(out.history.size() == 8);
}

TEST_CASE("vegas is worker-count invariant") {
  const Expr f = wrap_closure([](std::span<const double> x) { return std::exp(-x[0] * x[1]); }, 2);
  VegasConfig c;
  c.calls_per_iteration = 10'000;
  c.iterations = 3;
  WorkerPool one(1), four(4);
  const auto a = vegas(f, BoundedRegion::cube(2, 0.0, 1.0), c, RngKey{2, 0, 0}, one).result;
  const auto b = vegas(f, BoundedRegion::cube(2, 0.0, 1.0), c, RngKey{2, 0, 0}, four).result;
  CHECK(std::memcmp(&a.value, &b.value, sizeof(double)) == 0);
  CHECK(std::memcmp(&a.error, &b.error, sizeof(double)) == 0);
}

TEST_CASE("grid refinement") {
  const VegasGrid g = VegasGrid::uniform(BoundedRegion{{0.0, 1.0}}, 10);
  // Equal weights leave the grid alone.
  const VegasGrid same = vegas_refine(g, Eigen::MatrixXd::Ones(1, 10), 1.5);
  for (int b = 0; b <= 10; ++b) CHECK(same.edges(0, b) == doctest::Approx(g.edges(0, b)).epsilon(1e-12));
  // Weight piled in the first bin pulls edges towards it.
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(1, 10, 1e-3);
  w(0, 0) = 1.0;
  const VegasGrid moved = vegas_refine(g, w, 1.5);
  CHECK(moved.edges(0, 1) < g.edges(0, 1));
  CHECK(moved.edges(0, 0) == 0.0);
  CHECK(moved.edges(0, 10) == 1.0);
  // Zero weight keeps the row.
  const VegasGrid kept = vegas_refine(g, Eigen::MatrixXd::Zero(1, 10), 1.5);
  CHECK(kept.edges == g.edges);
}

TEST_CASE("vegas rejects too few calls") {
  VegasConfig c;
  c.calls_per_iteration = 10;
  CHECK_THROWS_AS(vegas(constant(1.0), BoundedRegion{{0.0, 1.0}}, c, RngKey{}), IntegrationError);
}
