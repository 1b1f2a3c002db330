#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hepkit/error.hpp"
#include "hepkit/fitting.hpp"

namespace hepkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Map between the unbounded internal coordinate and a parameter's range.
struct BoundTransform {
  std::optional<double> lo, hi;

  double to_external(double u) const {
    if (lo && hi) return *lo + (*hi - *lo) * 0.5 * (std::sin(u) + 1.0);
    if (lo) return *lo - 1.0 + std::sqrt(u * u + 1.0);
    if (hi) return *hi + 1.0 - std::sqrt(u * u + 1.0);
    return u;
  }
  double to_internal(double v) const {
    if (lo && hi) return std::asin(std::clamp(2.0 * (v - *lo) / (*hi - *lo) - 1.0, -1.0, 1.0));
    if (lo) {
      const double t = v - *lo + 1.0;
      return std::sqrt(std::max(0.0, t * t - 1.0));
    }
    if (hi) {
      const double t = *hi - v + 1.0;
      return std::sqrt(std::max(0.0, t * t - 1.0));
    }
    return v;
  }
  /// Keeps sine-mapped values strictly inside the range after rounding.
  double clamp(double v) const {
    if (lo) v = std::max(v, *lo);
    if (hi) v = std::min(v, *hi);
    return v;
  }
};

struct Vertex {
  Eigen::VectorXd u;
  double f;
};

class Problem {
 public:
  Problem(const Objective& objective, const ParamSet& params, std::vector<std::size_t> free)
      : objective_(objective), params_(params), free_(std::move(free)) {
    for (auto i : free_) transforms_.push_back({params_[i]->lower(), params_[i]->upper()});
  }

  std::size_t dims() const { return free_.size(); }
  std::size_t calls() const { return calls_; }
  const BoundTransform& transform(std::size_t j) const { return transforms_[j]; }
  std::size_t index(std::size_t j) const { return free_[j]; }

  double at_internal(const Eigen::VectorXd& u) {
    for (std::size_t j = 0; j < free_.size(); ++j)
      params_[free_[j]]->set_value(transforms_[j].clamp(transforms_[j].to_external(u[static_cast<Eigen::Index>(j)])));
    return call();
  }
  double at_external(const Eigen::VectorXd& v) {
    for (std::size_t j = 0; j < free_.size(); ++j)
      params_[free_[j]]->set_value(v[static_cast<Eigen::Index>(j)]);
    return call();
  }
  Eigen::VectorXd external(const Eigen::VectorXd& u) const {
    Eigen::VectorXd v(u.size());
    for (Eigen::Index j = 0; j < u.size(); ++j) {
      const auto& t = transforms_[static_cast<std::size_t>(j)];
      v[j] = t.clamp(t.to_external(u[j]));
    }
    return v;
  }

 private:
  double call() {
    ++calls_;
    const double f = objective_(params_);
    return std::isnan(f) ? kInf : f;
  }

  const Objective& objective_;
  const ParamSet& params_;
  std::vector<std::size_t> free_;
  std::vector<BoundTransform> transforms_;
  std::size_t calls_ = 0;
};

Eigen::VectorXd initial_steps(const Problem& p, const ParamSet& params, const Eigen::VectorXd& u0) {
  Eigen::VectorXd steps(u0.size());
  for (Eigen::Index j = 0; j < u0.size(); ++j) {
    const auto& t = p.transform(static_cast<std::size_t>(j));
    const auto& par = params[p.index(static_cast<std::size_t>(j))];
    const double v = par->value();
    double target = v + par->step();
    if (t.hi && target > *t.hi) target = v - par->step();
    if (t.lo && target < *t.lo) target = t.hi ? 0.5 * (*t.lo + *t.hi) : v + par->step();
    double d = t.to_internal(target) - u0[j];
    if (!(std::abs(d) > 1e-12)) d = 0.1;
    steps[j] = d;
  }
  return steps;
}

enum class SimplexStop { Converged, Budget };

/// Adaptive-coefficient Nelder-Mead (Gao & Han parameters) from `start`.
SimplexStop nelder_mead(Problem& p, Vertex& best, const Eigen::VectorXd& steps, double tolerance,
                        std::size_t& iterations_left) {
  const auto n = static_cast<Eigen::Index>(p.dims());
  const double dn = static_cast<double>(n);
  const double reflect = 1.0;
  const double expand = 1.0 + 2.0 / dn;
  const double contract = 0.75 - 1.0 / (2.0 * dn);
  const double shrink = 1.0 - 1.0 / dn;

  std::vector<Vertex> simplex;
  simplex.push_back(best);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd u = best.u;
    u[j] += steps[j];
    simplex.push_back({u, p.at_internal(u)});
  }

  for (;;) {
    std::sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    best = simplex.front();
    const double spread = simplex.back().f - simplex.front().f;
    double size = 0;
    for (const auto& v : simplex) size = std::max(size, (v.u - best.u).cwiseAbs().maxCoeff());
    if (spread <= tolerance || size <= 1e-13 * (1.0 + best.u.cwiseAbs().maxCoeff()))
      return SimplexStop::Converged;
    if (iterations_left == 0) return SimplexStop::Budget;
    --iterations_left;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) centroid += simplex[static_cast<std::size_t>(j)].u;
    centroid /= dn;
    Vertex& worst = simplex.back();
    const double second_worst = simplex[simplex.size() - 2].f;

    const Eigen::VectorXd xr = centroid + reflect * (centroid - worst.u);
    const double fr = p.at_internal(xr);
    if (fr < simplex.front().f) {
      const Eigen::VectorXd xe = centroid + expand * (xr - centroid);
      const double fe = p.at_internal(xe);
      worst = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
      continue;
    }
    if (fr < second_worst) {
      worst = {xr, fr};
      continue;
    }
    if (fr < worst.f) {
      const Eigen::VectorXd xc = centroid + contract * (xr - centroid);
      const double fc = p.at_internal(xc);
      if (fc <= fr) {
        worst = {xc, fc};
        continue;
      }
    } else {
      const Eigen::VectorXd xc = centroid + contract * (worst.u - centroid);
      const double fc = p.at_internal(xc);
      if (fc < worst.f) {
        worst = {xc, fc};
        continue;
      }
    }
    for (std::size_t i = 1; i < simplex.size(); ++i) {
      simplex[i].u = simplex[0].u + shrink * (simplex[i].u - simplex[0].u);
      simplex[i].f = p.at_internal(simplex[i].u);
    }
  }
}

}  // namespace

FitResult minimize(const Objective& objective, const ParamSet& params, const MinimizerConfig& config) {
  FitResult result;
  result.params = params;
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < params.size(); ++i)
    if (!params[i]->fixed()) free.push_back(i);
  result.free_indices = free;
  result.errors.assign(params.size(), std::nullopt);

  if (free.empty()) {
    result.nll_min = objective(params);
    result.n_calls = 1;
    result.values = params.values();
    result.status = FitStatus::Converged;
    return result;
  }

  Problem problem(objective, params, free);
  const auto n = static_cast<Eigen::Index>(free.size());
  Eigen::VectorXd u0(n);
  for (Eigen::Index j = 0; j < n; ++j)
    u0[j] = problem.transform(static_cast<std::size_t>(j)).to_internal(params[free[static_cast<std::size_t>(j)]]->value());
  const Eigen::VectorXd steps = initial_steps(problem, params, u0);

  Vertex best{u0, problem.at_internal(u0)};
  std::size_t budget = config.max_iterations;
  SimplexStop stop = nelder_mead(problem, best, steps, config.tolerance, budget);
  // Restart around the optimum until a fresh simplex stops improving it,
  // which guards against premature collapse.
  for (int restart = 0; restart < 5 && stop == SimplexStop::Converged; ++restart) {
    const double before = best.f;
    stop = nelder_mead(problem, best, steps * 0.1, config.tolerance, budget);
    if (!(best.f < before - config.tolerance)) break;
  }

  Eigen::VectorXd v_best = problem.external(best.u);
  problem.at_external(v_best);
  result.nll_min = best.f;
  result.values = params.values();
  if (stop == SimplexStop::Budget) {
    result.status = FitStatus::MaxIterations;
    result.n_calls = problem.calls();
    return result;
  }

  // Central differences in external coordinates: Hessian and gradient.
  Eigen::MatrixXd hess(n, n);
  Eigen::VectorXd grad(n);
  auto derivatives = [&](const Eigen::VectorXd& v0, double f0) {
    Eigen::VectorXd h(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& t = problem.transform(static_cast<std::size_t>(j));
      double step = std::max(1e-4 * std::abs(v0[j]), 1e-6);
      if (t.lo) step = std::min(step, 0.5 * (v0[j] - *t.lo));
      if (t.hi) step = std::min(step, 0.5 * (*t.hi - v0[j]));
      if (!(step > 0)) return false;
      h[j] = step;
    }
    auto shifted = [&](Eigen::Index a, double sa, Eigen::Index b, double sb) {
      Eigen::VectorXd v = v0;
      v[a] += sa * h[a];
      if (b >= 0) v[b] += sb * h[b];
      return problem.at_external(v);
    };
    for (Eigen::Index a = 0; a < n; ++a) {
      const double fp = shifted(a, 1, -1, 0);
      const double fm = shifted(a, -1, -1, 0);
      hess(a, a) = (fp - 2 * f0 + fm) / (h[a] * h[a]);
      grad[a] = (fp - fm) / (2 * h[a]);
      for (Eigen::Index b = 0; b < a; ++b) {
        const double fpp = shifted(a, 1, b, 1);
        const double fpm = shifted(a, 1, b, -1);
        const double fmp = shifted(a, -1, b, 1);
        const double fmm = shifted(a, -1, b, -1);
        hess(a, b) = hess(b, a) = (fpp - fpm - fmp + fmm) / (4 * h[a] * h[b]);
      }
    }
    problem.at_external(v0);
    return hess.allFinite() && grad.allFinite();
  };

  bool hessian_ok = derivatives(v_best, best.f);
  // Newton steps on the quadratic model remove what is left of the
  // simplex tolerance; each is kept only if it lowers the objective.
  for (int polish = 0; polish < 5 && hessian_ok; ++polish) {
    const Eigen::LLT<Eigen::MatrixXd> llt(hess);
    if (llt.info() != Eigen::Success) break;
    const Eigen::VectorXd candidate = v_best - llt.solve(grad);
    bool inside = candidate.allFinite();
    for (Eigen::Index j = 0; j < n && inside; ++j) {
      const auto& t = problem.transform(static_cast<std::size_t>(j));
      inside = (!t.lo || candidate[j] > *t.lo) && (!t.hi || candidate[j] < *t.hi);
    }
    if (!inside) break;
    const double fc = problem.at_external(candidate);
    if (!(fc < result.nll_min)) {
      problem.at_external(v_best);
      break;
    }
    v_best = candidate;
    result.nll_min = fc;
    result.values = params.values();
    hessian_ok = derivatives(v_best, fc);
  }
  result.n_calls = problem.calls();

  if (hessian_ok) {
    // Flat directions show up as a vanishing eigenvalue of the
    // unit-diagonal (correlation-scaled) Hessian.
    hessian_ok = (hess.diagonal().array() > 0).all();
    if (hessian_ok) {
      const Eigen::VectorXd scale = hess.diagonal().cwiseSqrt().cwiseInverse();
      const Eigen::MatrixXd unit = scale.asDiagonal() * hess * scale.asDiagonal();
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(unit, Eigen::EigenvaluesOnly);
      hessian_ok = eig.eigenvalues().minCoeff() > 1e-10;
    }
  }
  if (hessian_ok) {
    const Eigen::LLT<Eigen::MatrixXd> llt(hess);
    if (llt.info() == Eigen::Success) {
      result.covariance = 2.0 * config.error_def * llt.solve(Eigen::MatrixXd::Identity(n, n));
      for (Eigen::Index j = 0; j < n; ++j) hessian_ok = hessian_ok && result.covariance(j, j) > 0;
    } else {
      hessian_ok = false;
    }
  }
  if (!hessian_ok) {
    result.covariance.resize(0, 0);
    result.status = FitStatus::HessianNotPosDef;
    return result;
  }
  for (Eigen::Index j = 0; j < n; ++j)
    result.errors[free[static_cast<std::size_t>(j)]] = std::sqrt(result.covariance(j, j));
  result.status = FitStatus::Converged;
  return result;
}

}  // namespace hepkit
