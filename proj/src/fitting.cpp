#include "hepkit/fitting.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hepkit/error.hpp"

namespace hepkit {

AnalyticNormalizer gaussian_integral(ParamRef mean, ParamRef sigma) {
  return {[mean = std::move(mean), sigma = std::move(sigma)](const BoundedRegion& r) {
    const double s = sigma->value() * std::numbers::sqrt2;
    const double lo = (r.lower(0) - mean->value()) / s;
    const double hi = (r.upper(0) - mean->value()) / s;
    // Stay in the tail where erf would cancel.
    if (lo > 0) return 0.5 * (std::erfc(lo) - std::erfc(hi));
    if (hi < 0) return 0.5 * (std::erfc(-hi) - std::erfc(-lo));
    return 0.5 * (std::erf(hi) - std::erf(lo));
  }};
}

AnalyticNormalizer exponential_integral(ParamRef tau) {
  return {[tau = std::move(tau)](const BoundedRegion& r) {
    const double t = tau->value();
    return -t * std::exp(-r.lower(0) / t) * std::expm1(-r.width(0) / t);
  }};
}

Pdf::Pdf(Expr shape, Normalizer normalizer, BoundedRegion range)
    : shape_(std::move(shape)),
      normalizer_(std::move(normalizer)),
      range_(std::move(range)),
      params_(shape_.parameters()) {
  if (range_.dims() != shape_.arity())
    throw FitError("pdf range dimension does not match the shape arity");
  if (const auto* a = std::get_if<AnalyticNormalizer>(&normalizer_); a && !a->integral)
    throw FitError("analytic normalizer without an integral function");
  if (const auto* n = std::get_if<NumericNormalizer>(&normalizer_);
      n && n->method == NumericNormalizer::Method::GaussKronrod && shape_.arity() != 1)
    throw FitError("Gauss-Kronrod normalization needs a one-dimensional shape");
}

double Pdf::compute() const {
  ++computations_;
  double norm = 0;
  if (const auto* a = std::get_if<AnalyticNormalizer>(&normalizer_)) {
    norm = a->integral(range_);
  } else {
    const auto& n = std::get<NumericNormalizer>(normalizer_);
    switch (n.method) {
      case NumericNormalizer::Method::GaussKronrod:
        norm = gk_adaptive(shape_, range_.lower(0), range_.upper(0), n.rel_tol, n.max_intervals).value;
        break;
      case NumericNormalizer::Method::PlainMC:
        norm = plain_mc(shape_, range_, n.calls, n.key).value;
        break;
      case NumericNormalizer::Method::Vegas: {
        VegasConfig cfg;
        cfg.calls_per_iteration = n.calls;
        cfg.iterations = n.iterations;
        norm = vegas(shape_, range_, cfg, n.key).result.value;
        break;
      }
    }
  }
  if (!(norm > 0) || !std::isfinite(norm)) {
    std::ostringstream os;
    os << "pdf normalization " << norm << " is not positive and finite";
    throw FitError(os.str());
  }
  return norm;
}

double Pdf::normalization() const {
  if (!caching_) return compute();
  bool hit = cache_valid_ && cache_key_.size() == params_.size();
  for (std::size_t i = 0; hit && i < params_.size(); ++i)
    hit = cache_key_[i] == std::bit_cast<std::uint64_t>(params_.value(i));
  if (hit) return cache_value_;
  cache_value_ = compute();
  cache_key_.resize(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i)
    cache_key_[i] = std::bit_cast<std::uint64_t>(params_.value(i));
  cache_valid_ = true;
  return cache_value_;
}

Pdf make_pdf(Expr shape, Normalizer normalizer, BoundedRegion range) {
  return Pdf(std::move(shape), std::move(normalizer), std::move(range));
}

ExtendedModel::ExtendedModel(std::vector<ParamRef> yields, std::vector<Pdf> pdfs) {
  if (yields.empty() || yields.size() != pdfs.size())
    throw FitError("extended model needs one yield per pdf and at least one component");
  const std::size_t arity = pdfs[0].arity();
  for (std::size_t k = 0; k < yields.size(); ++k) {
    if (!yields[k]) throw FitError("null yield parameter");
    if (pdfs[k].arity() != arity) throw FitError("component pdfs disagree on arity");
    components_.push_back({std::move(yields[k]), std::move(pdfs[k])});
  }
  (void)parameters();  // rejects clashing names early
}

double ExtendedModel::expected_events() const {
  double total = 0;
  for (const auto& c : components_) total += c.yield->value();
  return total;
}

double ExtendedModel::density(std::span<const double> x) const {
  double d = 0;
  for (const auto& c : components_) d += c.yield->value() * c.pdf(x);
  return d;
}

ParamSet ExtendedModel::parameters() const {
  ParamSet out;
  for (const auto& c : components_) out.append(c.pdf.parameters());
  for (const auto& c : components_) out.append(c.yield);
  return out;
}

ExtendedModel add_pdfs(std::vector<ParamRef> yields, std::vector<Pdf> pdfs) {
  return ExtendedModel(std::move(yields), std::move(pdfs));
}

ModelEvaluator::ModelEvaluator(const ExtendedModel& model, const ColumnStore& store,
                               const std::vector<std::string>& observable_columns)
    : n_events_(store.size()) {
  if (observable_columns.size() != model.arity())
    throw FitError("model arity " + std::to_string(model.arity()) + " but " +
                   std::to_string(observable_columns.size()) + " observable columns");
  for (const auto& name : observable_columns) columns_.push_back(store.column<double>(name));
  for (const auto& c : model) {
    shapes_.push_back(&c.pdf.shape().node());
    inv_norms_.push_back(1.0 / c.pdf.normalization());
    yields_.push_back(c.yield->value());
  }
}

void ModelEvaluator::pdf_values(std::size_t i, std::span<double> point, std::span<double> out) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) point[c] = columns_[c][i];
  for (std::size_t k = 0; k < shapes_.size(); ++k) out[k] = shapes_[k]->eval(point) * inv_norms_[k];
}

namespace {

/// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0;
  double carry = 0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      carry += (sum - t) + v;
    else
      carry += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

double nll(const ExtendedModel& model, const ColumnStore& store,
           const std::vector<std::string>& observable_columns, WorkerPool& pool) {
  if (store.empty()) throw FitError("likelihood over an empty dataset");
  const ModelEvaluator eval(model, store, observable_columns);
  const std::size_t k = eval.species();

  const BulkEvaluationGuard guard;
  const CompensatedSum log_sum = reduce_chunks(
      pool, store.size(), CompensatedSum{},
      [&](std::size_t begin, std::size_t end) {
        CompensatedSum s;
        std::vector<double> point(observable_columns.size());
        std::vector<double> pdf(k);
        for (std::size_t i = begin; i < end; ++i) {
          eval.pdf_values(i, point, pdf);
          double density = 0;
          for (std::size_t c = 0; c < k; ++c) density += eval.yield(c) * pdf[c];
          if (!(density > 0) || !std::isfinite(density)) {
            std::ostringstream os;
            os.precision(17);
            os << "model density " << density << " is not positive at event " << i << " "
               << format_point(point);
            throw FitError(os.str());
          }
          s.add(std::log(density));
        }
        return s;
      },
      [](CompensatedSum& acc, const CompensatedSum& part) {
        acc.add(part.sum);
        acc.add(part.carry);
      });
  return model.expected_events() - log_sum.value();
}

const char* to_string(FitStatus status) noexcept {
  switch (status) {
    case FitStatus::Converged: return "Converged";
    case FitStatus::MaxIterations: return "MaxIterations";
    case FitStatus::HessianNotPosDef: return "HessianNotPosDef";
  }
  return "?";
}

std::optional<double> FitResult::error(std::string_view name) const {
  const auto i = params.index_of(name);
  if (!i) throw std::out_of_range("unknown parameter '" + std::string(name) + "'");
  return errors[*i];
}

double FitResult::value(std::string_view name) const {
  const auto i = params.index_of(name);
  if (!i) throw std::out_of_range("unknown parameter '" + std::string(name) + "'");
  return values[*i];
}

FitResult fit(const ExtendedModel& model, const ColumnStore& store,
              const std::vector<std::string>& observable_columns, const MinimizerConfig& config,
              WorkerPool& pool) {
  const ParamSet params = model.parameters();
  // Surface data or model errors at the starting point directly.
  (void)nll(model, store, observable_columns, pool);
  const Objective objective = [&](const ParamSet&) {
    try {
      return nll(model, store, observable_columns, pool);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  return minimize(objective, params, config);
}

}  // namespace hepkit
