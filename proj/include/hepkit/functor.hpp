#pragma once

#include <concepts>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hepkit/column_store.hpp"
#include "hepkit/parallel.hpp"
#include "hepkit/parameter.hpp"

namespace hepkit {

namespace detail {
struct Node;
}

/// Immutable expression tree of parametric real functions over points of
/// fixed arity. Copies share structure; parameters are the only mutable
/// state and are read at evaluation time, so a set_value() is visible to
/// the next evaluation of every expression containing that parameter.
class Expr {
 public:
  explicit Expr(std::shared_ptr<const detail::Node> node);

  /// Throws EvaluationError if the point arity is wrong or the value is undefined.
  double operator()(std::span<const double> x) const;
  double operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }

  std::size_t arity() const noexcept;

  /// Leaf parameters in tree order (left to right), each listed once.
  ParamSet parameters() const;

  const detail::Node& node() const noexcept { return *node_; }

 private:
  std::shared_ptr<const detail::Node> node_;
};

namespace detail {
struct Node {
  virtual ~Node() = default;
  virtual double eval(std::span<const double> x) const = 0;
  virtual std::size_t arity() const noexcept = 0;
  virtual void collect(ParamSet& out) const = 0;
};
}  // namespace detail

/// Normalized density exp(-(x-mean)^2 / (2 sigma^2)) / (sigma sqrt(2 pi)) of x[0].
Expr gaussian(ParamRef mean, ParamRef sigma);

/// exp(-x[0] / tau), unnormalized.
Expr exponential(ParamRef tau);

/// x[index] of a point with the given arity.
Expr variable(std::size_t index = 0, std::size_t arity = 1);

Expr constant(double c, std::size_t arity = 1);

using ParametricFn = std::function<double(std::span<const double>, const ParamSet&)>;
using PlainFn = std::function<double(std::span<const double>)>;

/// Turns a user callable into an expression leaf. `f(point, params)` sees
/// the ParamSet passed here.
Expr wrap_closure(ParametricFn f, ParamSet params, std::size_t arity = 1);
Expr wrap_closure(PlainFn f, std::size_t arity = 1);

template <typename F>
  requires std::invocable<F, std::span<const double>> &&
           (!std::same_as<std::decay_t<F>, PlainFn>)
Expr wrap_closure(F&& f, std::size_t arity = 1) {
  return wrap_closure(PlainFn(std::forward<F>(f)), arity);
}

template <typename F>
  requires std::invocable<F, std::span<const double>, const ParamSet&> &&
           (!std::same_as<std::decay_t<F>, ParametricFn>)
Expr wrap_closure(F&& f, ParamSet params, std::size_t arity = 1) {
  return wrap_closure(ParametricFn(std::forward<F>(f)), std::move(params), arity);
}

enum class BinaryOp { Add, Subtract, Multiply, Divide };

/// Pointwise arithmetic; both sides must share the input arity.
Expr combine(BinaryOp op, const Expr& a, const Expr& b);

inline Expr operator+(const Expr& a, const Expr& b) { return combine(BinaryOp::Add, a, b); }
inline Expr operator-(const Expr& a, const Expr& b) { return combine(BinaryOp::Subtract, a, b); }
inline Expr operator*(const Expr& a, const Expr& b) { return combine(BinaryOp::Multiply, a, b); }
inline Expr operator/(const Expr& a, const Expr& b) { return combine(BinaryOp::Divide, a, b); }

/// outer(inners[0](x), ..., inners[k-1](x)). Requires outer.arity() == k and
/// a common inner arity; throws std::invalid_argument otherwise.
Expr compose(const Expr& outer, const std::vector<Expr>& inners);

template <typename... Inner>
Expr compose(const Expr& outer, const Expr& first, const Inner&... rest) {
  return compose(outer, std::vector<Expr>{first, rest...});
}

/// Function values aligned index-for-index with a source store.
struct EvalColumn {
  std::vector<double> values;
  std::size_t size() const noexcept { return values.size(); }
};

/// Evaluates expr on each row, using the named real64 columns as the point.
EvalColumn map_evaluate(const Expr& expr, const ColumnStore& store,
                        const std::vector<std::string>& arg_columns,
                        WorkerPool& pool = serial_pool());

/// Renders a point as "(x0, x1, ...)" for diagnostics.
std::string format_point(std::span<const double> x);

}  // namespace hepkit
