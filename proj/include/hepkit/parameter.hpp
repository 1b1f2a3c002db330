#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hepkit {

/// A named, optionally bounded, real-valued model parameter.
///
/// Parameters are shared between the expression leaves that read them and
/// the ParamSets that expose them, so they are handled through ParamRef.
class Parameter {
 public:
  Parameter(std::string name, double value, double step = 0.1,
            std::optional<double> lower = std::nullopt,
            std::optional<double> upper = std::nullopt, bool fixed = false);

  const std::string& name() const noexcept { return name_; }
  double value() const noexcept { return value_; }
  double step() const noexcept { return step_; }
  std::optional<double> lower() const noexcept { return lower_; }
  std::optional<double> upper() const noexcept { return upper_; }
  bool fixed() const noexcept { return fixed_; }
  bool bounded() const noexcept { return lower_.has_value() || upper_.has_value(); }

  /// Rejects values outside [lower, upper] with std::invalid_argument.
  void set_value(double v);
  void set_step(double s);
  void set_fixed(bool f) noexcept { fixed_ = f; }
  void set_bounds(std::optional<double> lower, std::optional<double> upper);

 private:
  std::string name_;
  double value_;
  double step_;
  std::optional<double> lower_;
  std::optional<double> upper_;
  bool fixed_;
};

using ParamRef = std::shared_ptr<Parameter>;

ParamRef make_parameter(std::string name, double value, double step = 0.1,
                        std::optional<double> lower = std::nullopt,
                        std::optional<double> upper = std::nullopt);

/// Ordered collection of parameters with unique names.
///
/// Holds references: setting a value through a ParamSet is visible to
/// every expression that reads the same parameter.
class ParamSet {
 public:
  ParamSet() = default;
  /// Throws std::invalid_argument on duplicate names.
  explicit ParamSet(std::vector<ParamRef> params);

  std::size_t size() const noexcept { return params_.size(); }
  bool empty() const noexcept { return params_.empty(); }

  const ParamRef& operator[](std::size_t i) const { return params_.at(i); }
  const ParamRef& at(std::string_view name) const;
  std::optional<std::size_t> index_of(std::string_view name) const;
  bool contains(std::string_view name) const { return index_of(name).has_value(); }

  double value(std::size_t i) const { return params_.at(i)->value(); }
  double value(std::string_view name) const { return at(name)->value(); }
  void set(std::string_view name, double v) { at(name)->set_value(v); }

  /// Appends, skipping parameters already present by identity.
  /// A different parameter with a clashing name is an error.
  void append(const ParamRef& p);
  void append(const ParamSet& other);

  std::vector<double> values() const;
  std::size_t free_count() const;

  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<ParamRef> params_;
};

/// True while a bulk data-parallel evaluation is running. Parameter
/// mutation during that window violates the evaluation contract.
bool bulk_evaluation_active() noexcept;

class BulkEvaluationGuard {
 public:
  BulkEvaluationGuard() noexcept;
  ~BulkEvaluationGuard();
  BulkEvaluationGuard(const BulkEvaluationGuard&) = delete;
  BulkEvaluationGuard& operator=(const BulkEvaluationGuard&) = delete;
};

}  // namespace hepkit
