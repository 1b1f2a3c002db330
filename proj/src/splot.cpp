#include "hepkit/splot.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "hepkit/error.hpp"

namespace hepkit {

namespace {

double density_at(const ModelEvaluator& eval, std::size_t i, std::span<double> point, std::span<double> pdf) {
  eval.pdf_values(i, point, pdf);
  double d = 0;
  for (std::size_t k = 0; k < pdf.size(); ++k) d += eval.yield(k) * pdf[k];
  if (!(d > 0) || !std::isfinite(d)) {
    std::ostringstream os;
    os << "model density " << d << " is not positive at event " << i;
    throw FitError(os.str());
  }
  return d;
}

}  // namespace

YieldMoments yield_moments(const ExtendedModel& model, const ColumnStore& store,
                           const std::vector<std::string>& observable_columns, WorkerPool& pool) {
  if (store.empty()) throw FitError("sPlot over an empty dataset");
  const ModelEvaluator eval(model, store, observable_columns);
  const auto k = static_cast<Eigen::Index>(eval.species());
  YieldMoments init{Eigen::VectorXd::Zero(k), Eigen::MatrixXd::Zero(k, k)};

  const BulkEvaluationGuard guard;
  return reduce_chunks(
      pool, store.size(), init,
      [&](std::size_t begin, std::size_t end) {
        YieldMoments m = init;
        std::vector<double> point(observable_columns.size());
        std::vector<double> pdf(eval.species());
        Eigen::VectorXd ratio(k);
        for (std::size_t i = begin; i < end; ++i) {
          const double d = density_at(eval, i, point, pdf);
          for (Eigen::Index a = 0; a < k; ++a) ratio[a] = pdf[static_cast<std::size_t>(a)] / d;
          m.pdf_over_density += ratio;
          m.curvature.noalias() += ratio * ratio.transpose();
        }
        return m;
      },
      [](YieldMoments& acc, const YieldMoments& part) {
        acc.pdf_over_density += part.pdf_over_density;
        acc.curvature += part.curvature;
      });
}

double refine_yields(const ExtendedModel& model, const ColumnStore& store,
                     const std::vector<std::string>& observable_columns, WorkerPool& pool,
                     std::size_t max_steps) {
  double residual = 0;
  for (std::size_t step = 0; step <= max_steps; ++step) {
    const YieldMoments m = yield_moments(model, store, observable_columns, pool);
    const Eigen::VectorXd gradient = Eigen::VectorXd::Ones(m.pdf_over_density.size()) - m.pdf_over_density;
    residual = gradient.cwiseAbs().maxCoeff();
    if (residual < 1e-14 || step == max_steps) break;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(m.curvature);
    if (ldlt.info() != Eigen::Success) throw FitError("yield curvature matrix is singular");
    const Eigen::VectorXd delta = ldlt.solve(gradient);
    double change = 0;
    for (std::size_t k = 0; k < model.size(); ++k) {
      const auto& y = model[k].yield;
      double v = y->value() - delta[static_cast<Eigen::Index>(k)];
      if (y->lower()) v = std::max(v, *y->lower());
      if (y->upper()) v = std::min(v, *y->upper());
      change = std::max(change, std::abs(v - y->value()) / std::max(1.0, std::abs(v)));
      y->set_value(v);
    }
    if (change == 0) break;
  }
  return residual;
}

SWeightMatrix splot_matrix(const ExtendedModel& model, const ColumnStore& store,
                           const std::vector<std::string>& observable_columns, WorkerPool& pool,
                           double max_offset) {
  const YieldMoments m = yield_moments(model, store, observable_columns, pool);
  const auto k = m.curvature.rows();

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.curvature, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0) || hi / lo > 1e12)
    throw FitError("sPlot matrix is singular (condition number " + std::to_string(lo > 0 ? hi / lo : INFINITY) +
                   "); two species are indistinguishable in the fit variable");

  SWeightMatrix out;
  out.inverse = m.curvature;
  out.covariance = m.curvature.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  out.yields.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) out.yields[j] = model[static_cast<std::size_t>(j)].yield->value();

  // Gradient of the NLL in the yields, scaled by each yield's uncertainty.
  for (Eigen::Index j = 0; j < k; ++j) {
    const double offset = std::abs(1.0 - m.pdf_over_density[j]) * std::sqrt(out.covariance(j, j));
    if (offset > max_offset) {
      std::ostringstream os;
      os << "yields are not at the likelihood optimum (species " << j << " is " << offset
         << " standard deviations off); refit or refine the yields first";
      throw FitError(os.str());
    }
  }
  return out;
}

ColumnStore splot_weights(const ExtendedModel& model, const ColumnStore& store,
                          const std::vector<std::string>& observable_columns,
                          const SWeightMatrix& matrix, const std::vector<std::string>& species,
                          WorkerPool& pool) {
  const ModelEvaluator eval(model, store, observable_columns);
  const std::size_t k = eval.species();
  if (static_cast<std::size_t>(matrix.covariance.rows()) != k)
    throw FitError("sWeight matrix does not match the number of species");
  for (std::size_t j = 0; j < k; ++j)
    if (eval.yield(j) != matrix.yields[static_cast<Eigen::Index>(j)])
      throw FitError("yields changed since the sWeight matrix was computed");
  if (!species.empty() && species.size() != k) throw FitError("need one species name per component");

  std::vector<std::string> names;
  for (std::size_t j = 0; j < k; ++j)
    names.push_back("sw_" + (species.empty() ? std::to_string(j) : species[j]));
  ColumnStore out(ColumnSchema::homogeneous(names));
  out.resize(store.size());
  std::vector<std::span<double>> cols;
  for (std::size_t j = 0; j < k; ++j) cols.push_back(out.mutable_column<double>(j));

  const BulkEvaluationGuard guard;
  for_chunks(pool, store.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> point(observable_columns.size());
    std::vector<double> pdf(k);
    Eigen::VectorXd ratio(static_cast<Eigen::Index>(k));
    for (std::size_t i = begin; i < end; ++i) {
      const double d = density_at(eval, i, point, pdf);
      for (std::size_t j = 0; j < k; ++j) ratio[static_cast<Eigen::Index>(j)] = pdf[j] / d;
      const Eigen::VectorXd w = matrix.covariance * ratio;
      for (std::size_t j = 0; j < k; ++j) cols[j][i] = w[static_cast<Eigen::Index>(j)];
    }
  });
  return out;
}

}  // namespace hepkit
