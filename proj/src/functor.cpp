#include "hepkit/functor.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hepkit/error.hpp"

namespace hepkit {

std::string format_point(std::span<const double> x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

namespace detail {
namespace {

struct GaussianNode final : Node {
  ParamRef mean, sigma;
  GaussianNode(ParamRef m, ParamRef s) : mean(std::move(m)), sigma(std::move(s)) {}

  double eval(std::span<const double> x) const override {
    const double s = sigma->value();
    if (!(s > 0))
      throw EvaluationError("gaussian: sigma = " + std::to_string(s) + " is not positive at " +
                            format_point(x));
    const double z = (x[0] - mean->value()) / s;
    return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi));
  }
  std::size_t arity() const noexcept override { return 1; }
  void collect(ParamSet& out) const override {
    out.append(mean);
    out.append(sigma);
  }
};

struct ExponentialNode final : Node {
  ParamRef tau;
  explicit ExponentialNode(ParamRef t) : tau(std::move(t)) {}

  double eval(std::span<const double> x) const override {
    const double t = tau->value();
    if (t == 0) throw EvaluationError("exponential: tau is zero at " + format_point(x));
    return std::exp(-x[0] / t);
  }
  std::size_t arity() const noexcept override { return 1; }
  void collect(ParamSet& out) const override { out.append(tau); }
};

struct VariableNode final : Node {
  std::size_t index, n;
  VariableNode(std::size_t i, std::size_t a) : index(i), n(a) {}
  double eval(std::span<const double> x) const override { return x[index]; }
  std::size_t arity() const noexcept override { return n; }
  void collect(ParamSet&) const override {}
};

struct ConstantNode final : Node {
  double c;
  std::size_t n;
  ConstantNode(double v, std::size_t a) : c(v), n(a) {}
  double eval(std::span<const double>) const override { return c; }
  std::size_t arity() const noexcept override { return n; }
  void collect(ParamSet&) const override {}
};

struct ClosureNode final : Node {
  ParametricFn fn;
  ParamSet params;
  std::size_t n;
  ClosureNode(ParametricFn f, ParamSet p, std::size_t a)
      : fn(std::move(f)), params(std::move(p)), n(a) {}
  double eval(std::span<const double> x) const override { return fn(x, params); }
  std::size_t arity() const noexcept override { return n; }
  void collect(ParamSet& out) const override { out.append(params); }
};

struct BinaryNode final : Node {
  BinaryOp op;
  Expr a, b;
  BinaryNode(BinaryOp o, Expr l, Expr r) : op(o), a(std::move(l)), b(std::move(r)) {}

  double eval(std::span<const double> x) const override {
    const double u = a.node().eval(x);
    const double v = b.node().eval(x);
    switch (op) {
      case BinaryOp::Add: return u + v;
      case BinaryOp::Subtract: return u - v;
      case BinaryOp::Multiply: return u * v;
      case BinaryOp::Divide:
        if (v == 0) throw EvaluationError("division by zero at " + format_point(x));
        return u / v;
    }
    return 0;
  }
  std::size_t arity() const noexcept override { return a.arity(); }
  void collect(ParamSet& out) const override {
    a.node().collect(out);
    b.node().collect(out);
  }
};

struct ComposeNode final : Node {
  Expr outer;
  std::vector<Expr> inners;
  ComposeNode(Expr o, std::vector<Expr> in) : outer(std::move(o)), inners(std::move(in)) {}

  double eval(std::span<const double> x) const override {
    constexpr std::size_t kInline = 16;
    std::array<double, kInline> small;
    std::vector<double> large;
    std::span<double> args;
    if (inners.size() <= kInline) {
      args = std::span<double>(small.data(), inners.size());
    } else {
      large.resize(inners.size());
      args = large;
    }
    for (std::size_t i = 0; i < inners.size(); ++i) args[i] = inners[i].node().eval(x);
    return outer.node().eval(args);
  }
  std::size_t arity() const noexcept override { return inners.front().arity(); }
  void collect(ParamSet& out) const override {
    outer.node().collect(out);
    for (const auto& e : inners) e.node().collect(out);
  }
};

}  // namespace
}  // namespace detail

Expr::Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {
  if (!node_) throw std::invalid_argument("null expression node");
}

double Expr::operator()(std::span<const double> x) const {
  if (x.size() != node_->arity())
    throw EvaluationError("expression of arity " + std::to_string(node_->arity()) +
                          " evaluated on a point of arity " + std::to_string(x.size()));
  return node_->eval(x);
}

std::size_t Expr::arity() const noexcept { return node_->arity(); }

ParamSet Expr::parameters() const {
  ParamSet out;
  node_->collect(out);
  return out;
}

Expr gaussian(ParamRef mean, ParamRef sigma) {
  if (!mean || !sigma) throw std::invalid_argument("gaussian: null parameter");
  return Expr(std::make_shared<detail::GaussianNode>(std::move(mean), std::move(sigma)));
}

Expr exponential(ParamRef tau) {
  if (!tau) throw std::invalid_argument("exponential: null parameter");
  return Expr(std::make_shared<detail::ExponentialNode>(std::move(tau)));
}

Expr variable(std::size_t index, std::size_t arity) {
  if (index >= arity) throw std::invalid_argument("variable index outside point arity");
  return Expr(std::make_shared<detail::VariableNode>(index, arity));
}

Expr constant(double c, std::size_t arity) {
  if (arity == 0) throw std::invalid_argument("arity must be at least 1");
  return Expr(std::make_shared<detail::ConstantNode>(c, arity));
}

Expr wrap_closure(ParametricFn f, ParamSet params, std::size_t arity) {
  if (!f) throw std::invalid_argument("wrap_closure: empty function");
  if (arity == 0) throw std::invalid_argument("arity must be at least 1");
  return Expr(std::make_shared<detail::ClosureNode>(std::move(f), std::move(params), arity));
}

Expr wrap_closure(PlainFn f, std::size_t arity) {
  if (!f) throw std::invalid_argument("wrap_closure: empty function");
  return wrap_closure(
      [g = std::move(f)](std::span<const double> x, const ParamSet&) { return g(x); }, ParamSet{},
      arity);
}

Expr combine(BinaryOp op, const Expr& a, const Expr& b) {
  if (a.arity() != b.arity())
    throw std::invalid_argument("cannot combine expressions of arity " + std::to_string(a.arity()) +
                                " and " + std::to_string(b.arity()));
  // Fail early on parameter name clashes between the operands.
  ParamSet check = a.parameters();
  check.append(b.parameters());
  return Expr(std::make_shared<detail::BinaryNode>(op, a, b));
}

Expr compose(const Expr& outer, const std::vector<Expr>& inners) {
  if (inners.empty()) throw std::invalid_argument("compose needs at least one inner expression");
  if (outer.arity() != inners.size())
    throw std::invalid_argument("compose: outer arity " + std::to_string(outer.arity()) +
                                " but " + std::to_string(inners.size()) + " inner expressions");
  for (const auto& e : inners)
    if (e.arity() != inners.front().arity())
      throw std::invalid_argument("compose: inner expressions disagree on arity");
  ParamSet check = outer.parameters();
  for (const auto& e : inners) check.append(e.parameters());
  return Expr(std::make_shared<detail::ComposeNode>(outer, inners));
}

EvalColumn map_evaluate(const Expr& expr, const ColumnStore& store,
                        const std::vector<std::string>& arg_columns, WorkerPool& pool) {
  if (arg_columns.size() != expr.arity())
    throw EvaluationError("map_evaluate: expression arity " + std::to_string(expr.arity()) +
                          " but " + std::to_string(arg_columns.size()) + " argument columns");
  std::vector<std::span<const double>> cols;
  cols.reserve(arg_columns.size());
  for (const auto& name : arg_columns) cols.push_back(store.column<double>(name));

  EvalColumn out;
  out.values.resize(store.size());
  const BulkEvaluationGuard guard;
  for_chunks(pool, store.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> point(cols.size());
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t c = 0; c < cols.size(); ++c) point[c] = cols[c][i];
      out.values[i] = expr.node().eval(point);
    }
  });
  return out;
}

}  // namespace hepkit
