#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <utility>

namespace hepkit {

/// Axis-aligned box, lower < upper in every dimension. No dimension limit.
class BoundedRegion {
 public:
  BoundedRegion(Eigen::VectorXd lower, Eigen::VectorXd upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    validate();
  }
  BoundedRegion(std::initializer_list<std::pair<double, double>> limits)
      : lower_(static_cast<Eigen::Index>(limits.size())),
        upper_(static_cast<Eigen::Index>(limits.size())) {
    Eigen::Index i = 0;
    for (const auto& [lo, hi] : limits) {
      lower_[i] = lo;
      upper_[i] = hi;
      ++i;
    }
    validate();
  }
  /// The cube [lo, hi]^dims.
  static BoundedRegion cube(std::size_t dims, double lo, double hi) {
    const auto n = static_cast<Eigen::Index>(dims);
    return {Eigen::VectorXd::Constant(n, lo), Eigen::VectorXd::Constant(n, hi)};
  }

  std::size_t dims() const noexcept { return static_cast<std::size_t>(lower_.size()); }
  const Eigen::VectorXd& lower() const noexcept { return lower_; }
  const Eigen::VectorXd& upper() const noexcept { return upper_; }
  double lower(std::size_t i) const { return lower_[static_cast<Eigen::Index>(i)]; }
  double upper(std::size_t i) const { return upper_[static_cast<Eigen::Index>(i)]; }
  double width(std::size_t i) const { return upper(i) - lower(i); }
  double volume() const { return (upper_ - lower_).prod(); }

 private:
  void validate() const {
    if (lower_.size() == 0 || lower_.size() != upper_.size())
      throw std::invalid_argument("region needs matching, non-empty bound vectors");
    for (Eigen::Index i = 0; i < lower_.size(); ++i)
      if (!(lower_[i] < upper_[i]) || !std::isfinite(lower_[i]) || !std::isfinite(upper_[i]))
        throw std::invalid_argument("region bounds must be finite with lower < upper");
  }

  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

}  // namespace hepkit
