#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "hepkit/column_store.hpp"
#include "hepkit/fitting.hpp"
#include "hepkit/parallel.hpp"

namespace hepkit {

/// sWeights covariance matrix V and the accumulated matrix it inverts,
/// (V^-1)_nj = sum_e pdf_n(x_e) pdf_j(x_e) / (sum_k N_k pdf_k(x_e))^2.
struct SWeightMatrix {
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd inverse;
  /// Yields the matrix was computed at.
  Eigen::VectorXd yields;
};

/// Per-event sums that define the extended-likelihood yield equations.
struct YieldMoments {
  /// sum_e pdf_j / D_e; equals 1 for every species at the yield optimum.
  Eigen::VectorXd pdf_over_density;
  /// sum_e pdf_n pdf_j / D_e^2.
  Eigen::MatrixXd curvature;
};

YieldMoments yield_moments(const ExtendedModel& model, const ColumnStore& store,
                           const std::vector<std::string>& observable_columns,
                           WorkerPool& pool = serial_pool());

/// Newton iteration on the yields alone, shapes held fixed, until the yield
/// equations hold to rounding. Returns the final max |1 - sum_e pdf_j / D_e|.
double refine_yields(const ExtendedModel& model, const ColumnStore& store,
                     const std::vector<std::string>& observable_columns,
                     WorkerPool& pool = serial_pool(), std::size_t max_steps = 50);

/// Builds V. Rejects yields that are off the likelihood optimum by more
/// than `max_offset` standard deviations, and near-singular matrices
/// (condition number above 1e12).
SWeightMatrix splot_matrix(const ExtendedModel& model, const ColumnStore& store,
                           const std::vector<std::string>& observable_columns,
                           WorkerPool& pool = serial_pool(), double max_offset = 1e-3);

/// sweight_n(e) = sum_j V_nj pdf_j(x_e) / sum_k N_k pdf_k(x_e), one column
/// "sw_<species>" per component, aligned with `store`.
ColumnStore splot_weights(const ExtendedModel& model, const ColumnStore& store,
                          const std::vector<std::string>& observable_columns,
                          const SWeightMatrix& matrix, const std::vector<std::string>& species = {},
                          WorkerPool& pool = serial_pool());

}  // namespace hepkit
