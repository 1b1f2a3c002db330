#pragma once

#include <string>
#include <vector>

#include "hepkit/fitting.hpp"
#include "hepkit/region.hpp"

namespace hepkit::cli {

/// A one-dimensional extended model assembled from built-in shape names.
struct BuiltModel {
  ExtendedModel model;
  /// Component names with repeats disambiguated ("gauss", "gauss_2", ...).
  std::vector<std::string> species;
  /// Unnormalized component shapes, for sampling.
  std::vector<Expr> shapes;
  ParamSet params;
  BoundedRegion range;
};

/// Parses "gauss+exp"-style specs. Shape parameters are mu, sigma (gauss)
/// and tau (exp); yields are n_<species>. Starting values derive from the
/// range and `expected_events`.
BuiltModel build_model(const std::string& spec, double lo, double hi, double expected_events);

}  // namespace hepkit::cli
