#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hepkit/column_store.hpp"
#include "hepkit/functor.hpp"
#include "hepkit/integration.hpp"
#include "hepkit/kinematics.hpp"
#include "hepkit/parallel.hpp"
#include "hepkit/random.hpp"

namespace hepkit {

/// Mother mass and ordered daughter masses (GeV) of an n-body decay, n >= 2.
struct DecaySpec {
  double mother_mass = 0;
  std::vector<double> daughter_masses;

  /// Throws KinematicsError(BelowThreshold) unless M > sum of daughter masses.
  void validate() const;
  std::size_t size() const noexcept { return daughter_masses.size(); }
};

/// Columns weight, p1_e, p1_px, p1_py, p1_pz, ..., pn_pz.
ColumnSchema phsp_schema(std::size_t n_daughters);

/// Weighted decay events stored column-wise in a ColumnStore.
class PhspEventBlock {
 public:
  /// `n_events` zero-initialized rows.
  explicit PhspEventBlock(std::size_t n_daughters, std::size_t n_events = 0);
  /// Adopts a store whose schema is phsp_schema(n) for some n >= 2.
  static PhspEventBlock from_store(ColumnStore store);

  std::size_t size() const noexcept { return store_.size(); }
  bool empty() const noexcept { return store_.empty(); }
  std::size_t daughters() const noexcept { return n_; }

  double weight(std::size_t event) const { return weights_()[event]; }
  std::span<const double> weights() const { return store_.column<double>(0); }
  FourVectorD daughter(std::size_t event, std::size_t k) const;
  /// Writes all daughters of one event into `out` (size daughters()).
  void event(std::size_t event, std::span<FourVectorD> out) const;

  void set_weight(std::size_t event, double w) { store_.mutable_column<double>(0)[event] = w; }
  void set_daughter(std::size_t event, std::size_t k, const FourVectorD& p);

  const ColumnStore& store() const noexcept { return store_; }

 private:
  PhspEventBlock(ColumnStore store, std::size_t n);
  std::span<const double> weights_() const { return store_.column<double>(0); }

  ColumnStore store_;
  std::size_t n_;
};

/// Generates one decay in the mother rest frame, filling `out` and
/// returning the event weight (product of the chain's breakup momenta).
/// Consumes n - 2 uniforms for the intermediate masses, then two per
/// two-body step (cos theta, phi).
double decay_at_rest(const DecaySpec& spec, CounterEngine& rng, std::span<FourVectorD> out);

/// Raubold-Lynch generation of n_events decays of `mother`. Event i draws
/// from key.at(i).
PhspEventBlock phsp_generate(const DecaySpec& spec, const FourVectorD& mother, std::size_t n_events,
                             const RngKey& key, WorkerPool& pool = serial_pool());

/// Product of independently maximized two-body factors; an upper bound on
/// every weight phsp_generate can return for this spec.
double phsp_max_weight(const DecaySpec& spec);

/// Keeps event i iff uniform(key.at(i)) * w_max < weight_i; kept events get
/// unit weight.
PhspEventBlock phsp_unweight(const PhspEventBlock& block, double w_max, const RngKey& key,
                             WorkerPool& pool = serial_pool());

/// Replaces daughter `daughter_index` (0-based) of every event by the
/// products of `subspec`, decayed isotropically in its rest frame. The new
/// daughters take its place in the ordering; weights multiply.
PhspEventBlock phsp_decay_chain(const PhspEventBlock& block, std::size_t daughter_index,
                                const DecaySpec& subspec, const RngKey& key,
                                WorkerPool& pool = serial_pool());

/// Maps an event's daughters to the argument point of an expression.
using PhspArgBuilder = std::function<void(std::span<const FourVectorD>, std::span<double>)>;

/// Weighted mean sum(w f) / sum(w) with its ratio-estimator standard error.
IntegrationResult phsp_average(const Expr& f, const PhspEventBlock& block,
                               const PhspArgBuilder& args, WorkerPool& pool = serial_pool());

}  // namespace hepkit
