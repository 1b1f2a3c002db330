#include <doctest.h>

#include <cmath>

#include "hepkit/error.hpp"
#include "hepkit/random.hpp"

using namespace hepkit;

TEST_CASE("philox4x32-10 known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(philox4x32(A4{0, 0, 0, 0}, A2{0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams and counters give distinct sequences") {
  CHECK(uniform(RngKey{1, 0, 0}) != uniform(RngKey{1, 1, 0}));
  CHECK(uniform(RngKey{1, 0, 0}) != uniform(RngKey{1, 0, 1}));
  CHECK(uniform(RngKey{1, 0, 0}) != uniform(RngKey{2, 0, 0}));
  CHECK(uniform(RngKey{5, 2, 9}) == uniform(RngKey{5, 2, 9}));
}

TEST_CASE("uniform and gaussian moments") {
  const std::size_t n = 200'000;
  double s = 0, s2 = 0, g = 0, g2 = 0;
  CounterEngine eng(RngKey{42, 0, 0});
  for (std::size_t i = 0; i < n; ++i) {
    const double u = eng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    s += u;
    s2 += u * u;
    const double z = eng.gaussian();
    g += z;
    g2 += z * z;
  }
  const double dn = static_cast<double>(n);
  CHECK(std::abs(s / dn - 0.5) < 5 * std::sqrt(1.0 / 12 / dn));
  CHECK(std::abs(s2 / dn - 1.0 / 3) < 5 * std::sqrt(4.0 / 45 / dn));
  CHECK(std::abs(g / dn) < 5 / std::sqrt(dn));
  CHECK(std::abs(g2 / dn - 1.0) < 5 * std::sqrt(2.0 / dn));
}

TEST_CASE("sample_pdf follows the density and is reproducible") {
  auto tau = make_parameter("tau", 1.0);
  const Expr f = exponential(tau);
  const BoundedRegion region{{0.0, 5.0}};
  WorkerPool one(1), three(3);
  const auto a = sample_pdf(f, region, 50'000, RngKey{3, streams::kSampling, 0}, {}, one);
  const auto b = sample_pdf(f, region, 50'000, RngKey{3, streams::kSampling, 0}, {}, three);
  CHECK(a == b);
  const auto x = a.column<double>("x");
  double mean = 0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  // Truncated exponential mean on [0, 5].
  const double truth = 1.0 - 5.0 * std::exp(-5.0) / (1.0 - std::exp(-5.0));
  CHECK(std::abs(mean - truth) < 5 * 1.0 / std::sqrt(50'000.0));
}

TEST_CASE("a proposal above the ceiling is reported") {
  const Expr f = variable();
  SampleOptions opts;
  opts.ceiling = 0.5;
  CHECK_THROWS_AS(sample_pdf(f, BoundedRegion{{0.0, 1.0}}, 100, RngKey{1, 0, 0}, opts), SamplingError);
}

TEST_CASE("quasi-random points fill the box") {
  const BoundedRegion box = BoundedRegion::cube(3, -1.0, 2.0);
  const auto pts = quasi_random_points(box, 1000);
  CHECK(pts.size() == 1000);
  for (const auto& p : pts)
    for (int d = 0; d < 3; ++d) {
      CHECK(p[d] >= -1.0);
      CHECK(p[d] <= 2.0);
    }
}
