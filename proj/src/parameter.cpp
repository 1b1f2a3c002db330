#include "hepkit/parameter.hpp"

#include <atomic>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace hepkit {

namespace {
std::atomic<int> g_bulk_depth{0};
}

bool bulk_evaluation_active() noexcept { return g_bulk_depth.load(std::memory_order_relaxed) > 0; }

BulkEvaluationGuard::BulkEvaluationGuard() noexcept { g_bulk_depth.fetch_add(1); }
BulkEvaluationGuard::~BulkEvaluationGuard() { g_bulk_depth.fetch_sub(1); }

Parameter::Parameter(std::string name, double value, double step, std::optional<double> lower,
                     std::optional<double> upper, bool fixed)
    : name_(std::move(name)), value_(value), step_(step), fixed_(fixed) {
  if (name_.empty()) throw std::invalid_argument("parameter name must not be empty");
  set_step(step);
  set_bounds(lower, upper);
  set_value(value);
}

void Parameter::set_value(double v) {
  assert(!bulk_evaluation_active() && "parameter mutated during bulk evaluation");
  if (!std::isfinite(v))
    throw std::invalid_argument("parameter '" + name_ + "': non-finite value");
  if ((lower_ && v < *lower_) || (upper_ && v > *upper_))
    throw std::invalid_argument("parameter '" + name_ + "': value " + std::to_string(v) +
                                " outside bounds");
  value_ = v;
}

void Parameter::set_step(double s) {
  if (!(s > 0) || !std::isfinite(s))
    throw std::invalid_argument("parameter '" + name_ + "': step must be positive");
  step_ = s;
}

void Parameter::set_bounds(std::optional<double> lower, std::optional<double> upper) {
  if (lower && upper && !(*lower < *upper))
    throw std::invalid_argument("parameter '" + name_ + "': lower bound must be below upper");
  lower_ = lower;
  upper_ = upper;
  if ((lower_ && value_ < *lower_) || (upper_ && value_ > *upper_))
    throw std::invalid_argument("parameter '" + name_ + "': value outside new bounds");
}

ParamRef make_parameter(std::string name, double value, double step, std::optional<double> lower,
                        std::optional<double> upper) {
  return std::make_shared<Parameter>(std::move(name), value, step, lower, upper);
}

ParamSet::ParamSet(std::vector<ParamRef> params) {
  for (auto& p : params) {
    if (!p) throw std::invalid_argument("null parameter");
    if (contains(p->name()))
      throw std::invalid_argument("duplicate parameter name '" + p->name() + "'");
    params_.push_back(std::move(p));
  }
}

const ParamRef& ParamSet::at(std::string_view name) const {
  const auto i = index_of(name);
  if (!i) throw std::out_of_range("unknown parameter '" + std::string(name) + "'");
  return params_[*i];
}

std::optional<std::size_t> ParamSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (params_[i]->name() == name) return i;
  return std::nullopt;
}

void ParamSet::append(const ParamRef& p) {
  for (const auto& q : params_) {
    if (q == p) return;
    if (q->name() == p->name())
      throw std::invalid_argument("two distinct parameters named '" + p->name() + "'");
  }
  params_.push_back(p);
}

void ParamSet::append(const ParamSet& other) {
  for (const auto& p : other) append(p);
}

std::vector<double> ParamSet::values() const {
  std::vector<double> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p->value());
  return out;
}

std::size_t ParamSet::free_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->fixed() ? 0 : 1;
  return n;
}

}  // namespace hepkit
