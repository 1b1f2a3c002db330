#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hepkit/column_store.hpp"
#include "hepkit/functor.hpp"
#include "hepkit/integration.hpp"
#include "hepkit/parallel.hpp"
#include "hepkit/parameter.hpp"
#include "hepkit/random.hpp"
#include "hepkit/region.hpp"

namespace hepkit {

/// Closed-form integral of a shape over a region, reading its parameters
/// at call time.
struct AnalyticNormalizer {
  std::function<double(const BoundedRegion&)> integral;
};

/// Integral computed with one of the library integrators. Monte Carlo
/// methods use the fixed `key`, so the normalization is a deterministic
/// function of the parameters.
struct NumericNormalizer {
  enum class Method { GaussKronrod, PlainMC, Vegas };
  Method method = Method::GaussKronrod;
  double rel_tol = 1e-10;
  std::size_t max_intervals = 1000;
  std::size_t calls = 200'000;
  std::size_t iterations = 5;
  RngKey key{};
};

using Normalizer = std::variant<AnalyticNormalizer, NumericNormalizer>;

/// Integral of gaussian(mean, sigma) over [lower(0), upper(0)].
AnalyticNormalizer gaussian_integral(ParamRef mean, ParamRef sigma);
/// Integral of exponential(tau) over [lower(0), upper(0)].
AnalyticNormalizer exponential_integral(ParamRef tau);

/// Shape divided by its integral over `range`. The integral is cached and
/// recomputed only when a shape parameter value changes bitwise.
///
/// The cache is not synchronized; bulk evaluators read normalization()
/// once before going parallel.
class Pdf {
 public:
  Pdf(Expr shape, Normalizer normalizer, BoundedRegion range);

  double normalization() const;
  double operator()(std::span<const double> x) const { return shape_(x) / normalization(); }
  double operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }

  const Expr& shape() const noexcept { return shape_; }
  const BoundedRegion& range() const noexcept { return range_; }
  const ParamSet& parameters() const noexcept { return params_; }
  std::size_t arity() const noexcept { return shape_.arity(); }

  /// Number of times the integral was actually computed.
  std::size_t normalization_count() const noexcept { return computations_; }
  void set_caching(bool enabled) noexcept { caching_ = enabled; }

 private:
  double compute() const;

  Expr shape_;
  Normalizer normalizer_;
  BoundedRegion range_;
  ParamSet params_;
  bool caching_ = true;
  mutable std::vector<std::uint64_t> cache_key_;
  mutable double cache_value_ = 0;
  mutable bool cache_valid_ = false;
  mutable std::size_t computations_ = 0;
};

Pdf make_pdf(Expr shape, Normalizer normalizer, BoundedRegion range);

struct Component {
  ParamRef yield;
  Pdf pdf;
};

/// Yield-weighted sum of normalized densities: sum_k N_k pdf_k(x).
class ExtendedModel {
 public:
  ExtendedModel(std::vector<ParamRef> yields, std::vector<Pdf> pdfs);

  std::size_t size() const noexcept { return components_.size(); }
  const Component& operator[](std::size_t k) const { return components_.at(k); }
  auto begin() const { return components_.begin(); }
  auto end() const { return components_.end(); }
  std::size_t arity() const noexcept { return components_.front().pdf.arity(); }

  double expected_events() const;
  double density(std::span<const double> x) const;
  double density(double x) const { return density(std::span<const double>(&x, 1)); }

  /// Shape parameters component by component, then the yields.
  ParamSet parameters() const;

 private:
  std::vector<Component> components_;
};

ExtendedModel add_pdfs(std::vector<ParamRef> yields, std::vector<Pdf> pdfs);

/// Frozen view of a model over a dataset: normalizations taken once at
/// construction, safe to query from many workers.
class ModelEvaluator {
 public:
  ModelEvaluator(const ExtendedModel& model, const ColumnStore& store,
                 const std::vector<std::string>& observable_columns);

  std::size_t events() const noexcept { return n_events_; }
  std::size_t species() const noexcept { return shapes_.size(); }
  double yield(std::size_t k) const { return yields_[k]; }
  const std::vector<double>& yields() const noexcept { return yields_; }

  /// Normalized component densities at event i. `point` is scratch of
  /// size arity.
  void pdf_values(std::size_t i, std::span<double> point, std::span<double> out) const;

 private:
  std::vector<const detail::Node*> shapes_;
  std::vector<double> inv_norms_;
  std::vector<double> yields_;
  std::vector<std::span<const double>> columns_;
  std::size_t n_events_;
};

/// Extended negative log-likelihood sum_k N_k - sum_e ln(sum_k N_k pdf_k(x_e)).
double nll(const ExtendedModel& model, const ColumnStore& store,
           const std::vector<std::string>& observable_columns, WorkerPool& pool = serial_pool());

enum class FitStatus { Converged, MaxIterations, HessianNotPosDef };

const char* to_string(FitStatus status) noexcept;

struct MinimizerConfig {
  std::size_t max_iterations = 2000;
  /// Simplex spread (max - min objective over the vertices) at convergence.
  double tolerance = 1e-8;
  /// Objective change that defines one standard deviation.
  double error_def = 0.5;
};

struct FitResult {
  ParamSet params;
  /// Parallel to params; empty optionals for fixed parameters and
  /// whenever the status is not Converged.
  std::vector<double> values;
  std::vector<std::optional<double>> errors;
  /// Covariance of the free parameters, in params order.
  Eigen::MatrixXd covariance;
  std::vector<std::size_t> free_indices;
  double nll_min = 0;
  FitStatus status = FitStatus::Converged;
  std::size_t n_calls = 0;

  std::optional<double> error(std::string_view name) const;
  double value(std::string_view name) const;
};

using Objective = std::function<double(const ParamSet&)>;

/// Nelder-Mead simplex in internal coordinates (sine map for two-sided
/// bounds, square-root map for one-sided ones), then a central-difference
/// Hessian in external coordinates for the errors. Leaves the parameters at
/// the best point found.
FitResult minimize(const Objective& objective, const ParamSet& params,
                   const MinimizerConfig& config = {});

/// Minimizes nll() over all free model parameters.
FitResult fit(const ExtendedModel& model, const ColumnStore& store,
              const std::vector<std::string>& observable_columns, const MinimizerConfig& config = {},
              WorkerPool& pool = serial_pool());

}  // namespace hepkit
