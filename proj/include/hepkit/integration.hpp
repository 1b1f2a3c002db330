#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <string>
#include <vector>

#include "hepkit/functor.hpp"
#include "hepkit/parallel.hpp"
#include "hepkit/quadrature.hpp"
#include "hepkit/random.hpp"
#include "hepkit/region.hpp"

namespace hepkit {

struct IntegrationResult {
  double value = 0;
  /// One standard deviation; for quadrature the Gauss-Kronrod estimate.
  double error = 0;
  std::size_t iterations = 0;
  /// Inter-iteration consistency of VEGAS; zero for every other method.
  double chi2_per_dof = 0;
  std::size_t calls_used = 0;
  /// False when an adaptive method stopped on its interval budget.
  bool converged = true;
};

/// Uniform sampling estimate V * mean(f) with error V * sd(f) / sqrt(calls).
/// Call i draws from key.at(i).
IntegrationResult plain_mc(const Expr& f, const BoundedRegion& region, std::size_t calls,
                           const RngKey& key, WorkerPool& pool = serial_pool());

/// Single 15-point Kronrod panel of a one-dimensional expression.
IntegrationResult gk15_static(const Expr& f, double a, double b);

/// `iterations` reports the number of panels; it equals max_intervals
/// (and `converged` is false) when the tolerance was not reached.
IntegrationResult gk_adaptive(const Expr& f, double a, double b, double rel_tol,
                              std::size_t max_intervals);

/// Per-dimension piecewise-uniform sampling density: row d holds the
/// bins + 1 edges of dimension d, `widths` the matching bin widths.
struct VegasGrid {
  Eigen::MatrixXd edges;
  Eigen::MatrixXd widths;

  /// Equal-width bins; every width in a row is the same double, so a
  /// constant integrand is sampled with zero variance.
  static VegasGrid uniform(const BoundedRegion& region, std::size_t bins);
  static VegasGrid from_edges(Eigen::MatrixXd edges);
  std::size_t dims() const noexcept { return static_cast<std::size_t>(edges.rows()); }
  std::size_t bins() const noexcept { return static_cast<std::size_t>(edges.cols()) - 1; }
  /// Throws IntegrationError unless every row is strictly increasing.
  void validate() const;
};

/// Moves the edges of each dimension so that every new bin carries the same
/// share of the damped weight ((r - 1) / ln r)^alpha, r being the smoothed
/// fraction of `weights` (dims x bins) in a bin. Rows with no weight are
/// left as they are. Endpoints never move.
VegasGrid vegas_refine(const VegasGrid& grid, const Eigen::MatrixXd& weights, double alpha);

struct VegasConfig {
  std::size_t calls_per_iteration = 100'000;
  std::size_t iterations = 10;
  double alpha = 1.5;
  std::size_t bins = 50;
  /// With adapt off the grid stays frozen (useful for bias checks).
  bool adapt = true;
};

struct VegasIteration {
  double value = 0;
  double variance = 0;
};

struct VegasOutcome {
  IntegrationResult result;
  VegasGrid grid;
  std::vector<VegasIteration> history;
  std::vector<std::string> warnings;
};

/// Importance-sampling VEGAS. Iteration estimates are combined with
/// inverse-variance weights; the grid is refined after every iteration
/// unless that iteration already had zero variance.
/// Call i of iteration k draws from key.at(k * calls_per_iteration + i).
VegasOutcome vegas(const Expr& f, const BoundedRegion& region, const VegasConfig& config,
                   const RngKey& key, WorkerPool& pool = serial_pool(),
                   const VegasGrid* initial_grid = nullptr);

}  // namespace hepkit
