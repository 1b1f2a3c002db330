#include "hepkit/integration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hepkit/error.hpp"

namespace hepkit {

namespace {

/// Running mean and sum of squared deviations, merged with Chan's formula.
struct Moments {
  double n = 0;
  double mean = 0;
  double m2 = 0;

  void add(double x) {
    n += 1;
    const double delta = x - mean;
    mean += delta / n;
    m2 += delta * (x - mean);
  }
  void merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = n + o.n;
    const double delta = o.mean - mean;
    mean += delta * (o.n / total);
    m2 += o.m2 + delta * delta * (n * o.n / total);
    n = total;
  }
  double variance_of_mean() const { return n > 1 ? m2 / (n - 1) / n : 0.0; }
};

[[noreturn]] void throw_non_finite(double v, std::span<const double> x) {
  std::ostringstream os;
  os.precision(17);
  os << "integrand value " << v << " is not finite at " << format_point(x);
  throw IntegrationError(os.str());
}

IntegrationResult from_adaptive(const AdaptiveQuadrature<double>& q, std::size_t max_intervals) {
  IntegrationResult r;
  r.value = q.value;
  r.error = q.error;
  r.iterations = q.converged ? q.intervals : max_intervals;
  r.calls_used = 15 * (2 * q.intervals - 1);
  r.converged = q.converged;
  return r;
}

}  // namespace

IntegrationResult plain_mc(const Expr& f, const BoundedRegion& region, std::size_t calls,
                           const RngKey& key, WorkerPool& pool) {
  if (calls < 2) throw IntegrationError("plain_mc needs at least 2 calls");
  const std::size_t d = region.dims();
  if (f.arity() != d) throw IntegrationError("integrand arity does not match region dimension");

  const BulkEvaluationGuard guard;
  const Moments m = reduce_chunks(
      pool, calls, Moments{},
      [&](std::size_t begin, std::size_t end) {
        Moments local;
        std::vector<double> x(d);
        for (std::size_t i = begin; i < end; ++i) {
          CounterEngine rng(key.at(i));
          for (std::size_t j = 0; j < d; ++j) x[j] = region.lower(j) + region.width(j) * rng.uniform();
          const double v = f.node().eval(x);
          if (!std::isfinite(v)) throw_non_finite(v, x);
          local.add(v);
        }
        return local;
      },
      [](Moments& acc, const Moments& part) { acc.merge(part); });

  const double volume = region.volume();
  IntegrationResult r;
  r.value = volume * m.mean;
  r.error = volume * std::sqrt(m.variance_of_mean());
  r.iterations = 1;
  r.calls_used = calls;
  return r;
}

IntegrationResult gk15_static(const Expr& f, double a, double b) {
  if (!(a < b)) throw IntegrationError("gk15_static needs a < b");
  if (f.arity() != 1) throw IntegrationError("Gauss-Kronrod integrates one-dimensional expressions");
  const auto est = gauss_kronrod15<double>([&](double x) { return f(x); }, a, b);
  IntegrationResult r;
  r.value = est.value;
  r.error = est.error;
  r.iterations = 1;
  r.calls_used = 15;
  return r;
}

IntegrationResult gk_adaptive(const Expr& f, double a, double b, double rel_tol,
                              std::size_t max_intervals) {
  if (!(a < b)) throw IntegrationError("gk_adaptive needs a < b");
  if (!(rel_tol >= 1e-14)) throw IntegrationError("gk_adaptive: rel_tol must be at least 1e-14");
  if (max_intervals == 0) throw IntegrationError("gk_adaptive: max_intervals must be positive");
  if (f.arity() != 1) throw IntegrationError("Gauss-Kronrod integrates one-dimensional expressions");
  const auto q = gauss_kronrod_adaptive<double>([&](double x) { return f(x); }, a, b, rel_tol,
                                                max_intervals);
  return from_adaptive(q, max_intervals);
}

VegasGrid VegasGrid::uniform(const BoundedRegion& region, std::size_t bins) {
  if (bins < 2) throw IntegrationError("VEGAS grid needs at least 2 bins");
  const auto d = static_cast<Eigen::Index>(region.dims());
  const auto nb = static_cast<Eigen::Index>(bins);
  VegasGrid g;
  g.edges.resize(d, nb + 1);
  g.widths.resize(d, nb);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double lo = region.lower()[j];
    const double hi = region.upper()[j];
    for (Eigen::Index k = 0; k <= nb; ++k)
      g.edges(j, k) = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(nb);
    g.edges(j, nb) = hi;
    g.widths.row(j).setConstant((hi - lo) / static_cast<double>(nb));
  }
  return g;
}

VegasGrid VegasGrid::from_edges(Eigen::MatrixXd edges) {
  if (edges.cols() < 3 || edges.rows() < 1) throw IntegrationError("VEGAS grid needs at least 2 bins");
  VegasGrid g;
  g.widths = edges.rightCols(edges.cols() - 1) - edges.leftCols(edges.cols() - 1);
  g.edges = std::move(edges);
  g.validate();
  return g;
}

void VegasGrid::validate() const {
  for (Eigen::Index j = 0; j < edges.rows(); ++j)
    for (Eigen::Index k = 1; k < edges.cols(); ++k)
      if (!(edges(j, k) > edges(j, k - 1)))
        throw IntegrationError("degenerate VEGAS grid: bin " + std::to_string(k - 1) +
                               " of dimension " + std::to_string(j) + " collapsed");
}

VegasGrid vegas_refine(const VegasGrid& grid, const Eigen::MatrixXd& weights, double alpha) {
  const Eigen::Index nb = static_cast<Eigen::Index>(grid.bins());
  if (weights.rows() != grid.edges.rows() || weights.cols() != nb)
    throw IntegrationError("vegas_refine: weight matrix shape does not match the grid");
  if ((weights.array() < 0).any() || !weights.allFinite())
    throw IntegrationError("vegas_refine: weights must be finite and non-negative");

  Eigen::MatrixXd new_edges = grid.edges;
  Eigen::VectorXd smooth(nb);
  Eigen::VectorXd damped(nb);
  Eigen::VectorXd cumulative(nb + 1);
  for (Eigen::Index j = 0; j < weights.rows(); ++j) {
    const auto w = weights.row(j);
    if (w.sum() == 0) continue;

    // Three-point smoothing of the raw bin weights.
    smooth[0] = (w[0] + w[1]) / 2;
    for (Eigen::Index k = 1; k + 1 < nb; ++k) smooth[k] = (w[k - 1] + w[k] + w[k + 1]) / 3;
    smooth[nb - 1] = (w[nb - 2] + w[nb - 1]) / 2;
    const double total = smooth.sum();

    for (Eigen::Index k = 0; k < nb; ++k) {
      const double r = smooth[k] / total;
      if (r <= 0)
        damped[k] = 0;
      else if (r >= 1)
        damped[k] = 1;
      else
        damped[k] = std::pow((r - 1) / std::log(r), alpha);
    }
    cumulative[0] = 0;
    for (Eigen::Index k = 0; k < nb; ++k) cumulative[k + 1] = cumulative[k] + damped[k];
    const double per_bin = cumulative[nb] / static_cast<double>(nb);

    // New edge i sits where the damped cumulative weight reaches i * per_bin.
    Eigen::Index k = 0;
    for (Eigen::Index i = 1; i < nb; ++i) {
      const double target = per_bin * static_cast<double>(i);
      while (k + 1 < nb && cumulative[k + 1] < target) ++k;
      while (damped[k] == 0 && k + 1 < nb) ++k;
      const double frac = std::clamp((target - cumulative[k]) / damped[k], 0.0, 1.0);
      new_edges(j, i) = grid.edges(j, k) + (grid.edges(j, k + 1) - grid.edges(j, k)) * frac;
    }
  }
  VegasGrid out = VegasGrid::from_edges(std::move(new_edges));
  // Untouched rows keep their exact widths.
  for (Eigen::Index j = 0; j < weights.rows(); ++j)
    if (weights.row(j).sum() == 0) out.widths.row(j) = grid.widths.row(j);
  return out;
}

namespace {

struct VegasPartial {
  Moments moments;
  Eigen::MatrixXd bin_weight;
  bool negative = false;
};

}  // namespace

VegasOutcome vegas(const Expr& f, const BoundedRegion& region, const VegasConfig& config,
                   const RngKey& key, WorkerPool& pool, const VegasGrid* initial_grid) {
  const std::size_t d = region.dims();
  if (f.arity() != d) throw IntegrationError("integrand arity does not match region dimension");
  if (config.iterations == 0) throw IntegrationError("VEGAS needs at least one iteration");
  if (config.calls_per_iteration < 2 * config.bins * d)
    throw IntegrationError("VEGAS needs at least 2 * bins * dims calls per iteration");

  VegasOutcome out;
  out.grid = initial_grid ? *initial_grid : VegasGrid::uniform(region, config.bins);
  if (out.grid.dims() != d) throw IntegrationError("initial VEGAS grid has the wrong dimension");
  const std::size_t nb = out.grid.bins();
  const double dbins = static_cast<double>(nb);
  const std::size_t calls = config.calls_per_iteration;

  const BulkEvaluationGuard guard;
  bool saw_negative = false;
  for (std::size_t it = 0; it < config.iterations; ++it) {
    const Eigen::MatrixXd& edges = out.grid.edges;
    const Eigen::MatrixXd& widths = out.grid.widths;
    VegasPartial init;
    init.bin_weight = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(nb));
    const RngKey base = key.at(static_cast<std::uint64_t>(it) * calls);

    const VegasPartial total = reduce_chunks(
        pool, calls, init,
        [&](std::size_t begin, std::size_t end) {
          VegasPartial local = init;
          std::vector<double> x(d);
          std::vector<Eigen::Index> bin(d);
          for (std::size_t i = begin; i < end; ++i) {
            CounterEngine rng(base.at(i));
            double jac = 1;
            for (std::size_t j = 0; j < d; ++j) {
              const double y = rng.uniform() * dbins;
              const auto k = std::min(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(nb - 1));
              const auto jj = static_cast<Eigen::Index>(j);
              const double width = widths(jj, k);
              x[j] = edges(jj, k) + (y - static_cast<double>(k)) * width;
              jac *= width * dbins;
              bin[j] = k;
            }
            const double fv = f.node().eval(x);
            if (!std::isfinite(fv)) throw_non_finite(fv, x);
            if (fv < 0) local.negative = true;
            const double g = fv * jac;
            local.moments.add(g);
            const double g2 = g * g;
            for (std::size_t j = 0; j < d; ++j) local.bin_weight(static_cast<Eigen::Index>(j), bin[j]) += g2;
          }
          return local;
        },
        [](VegasPartial& acc, const VegasPartial& part) {
          acc.moments.merge(part.moments);
          acc.bin_weight += part.bin_weight;
          acc.negative = acc.negative || part.negative;
        });

    saw_negative = saw_negative || total.negative;
    out.history.push_back({total.moments.mean, total.moments.variance_of_mean()});
    if (config.adapt && total.moments.m2 > 0) out.grid = vegas_refine(out.grid, total.bin_weight, config.alpha);
  }
  if (saw_negative)
    out.warnings.emplace_back("integrand took negative values; grid refinement used |f|");

  // Inverse-variance combination. Zero-variance iterations are exact and,
  // if present, are averaged on their own.
  std::vector<VegasIteration> exact;
  for (const auto& h : out.history)
    if (h.variance == 0) exact.push_back(h);

  IntegrationResult& r = out.result;
  r.iterations = config.iterations;
  r.calls_used = config.iterations * calls;
  if (!exact.empty()) {
    double sum = 0;
    for (const auto& h : exact) sum += h.value;
    r.value = sum / static_cast<double>(exact.size());
    r.error = 0;
    double chi2 = 0;
    for (const auto& h : exact) chi2 += (h.value - r.value) * (h.value - r.value);
    r.chi2_per_dof = chi2 == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    return out;
  }
  double sum_w = 0;
  double sum_wv = 0;
  for (const auto& h : out.history) {
    const double w = 1.0 / h.variance;
    sum_w += w;
    sum_wv += w * h.value;
  }
  r.value = sum_wv / sum_w;
  r.error = std::sqrt(1.0 / sum_w);
  if (out.history.size() > 1) {
    double chi2 = 0;
    for (const auto& h : out.history) chi2 += (h.value - r.value) * (h.value - r.value) / h.variance;
    r.chi2_per_dof = chi2 / static_cast<double>(out.history.size() - 1);
  }
  return out;
}

}  // namespace hepkit
