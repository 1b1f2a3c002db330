#include "hepkit/phase_space.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hepkit {

namespace {

constexpr std::array<const char*, 4> kComponents = {"e", "px", "py", "pz"};

std::size_t daughters_in(const ColumnSchema& schema) {
  if (schema.size() < 9 || (schema.size() - 1) % 4 != 0) return 0;
  return (schema.size() - 1) / 4;
}

bool same_mass(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({a, b, 1e-6}); }

}  // namespace

void DecaySpec::validate() const {
  if (daughter_masses.size() < 2)
    throw KinematicsError(KinematicsError::Kind::NonPhysical, "a decay needs at least two daughters");
  double sum = 0;
  for (double m : daughter_masses) {
    if (!(m >= 0) || !std::isfinite(m))
      throw KinematicsError(KinematicsError::Kind::NonPhysical, "daughter masses must be non-negative");
    sum += m;
  }
  if (!(mother_mass > sum)) {
    std::ostringstream os;
    os.precision(17);
    os << "mother mass " << mother_mass << " is not above the threshold " << sum;
    throw KinematicsError(KinematicsError::Kind::BelowThreshold, os.str());
  }
}

ColumnSchema phsp_schema(std::size_t n_daughters) {
  std::vector<std::string> names{"weight"};
  for (std::size_t k = 1; k <= n_daughters; ++k)
    for (const char* c : kComponents) names.push_back("p" + std::to_string(k) + "_" + c);
  return ColumnSchema::homogeneous(names);
}

PhspEventBlock::PhspEventBlock(std::size_t n_daughters, std::size_t n_events)
    : store_(phsp_schema(n_daughters), n_events), n_(n_daughters) {
  if (n_daughters < 2) throw StoreError("an event block needs at least two daughters");
  store_.resize(n_events);
}

PhspEventBlock::PhspEventBlock(ColumnStore store, std::size_t n) : store_(std::move(store)), n_(n) {}

PhspEventBlock PhspEventBlock::from_store(ColumnStore store) {
  const std::size_t n = daughters_in(store.schema());
  if (n < 2 || !(store.schema() == phsp_schema(n)))
    throw StoreError("store does not have the phase-space event schema");
  return PhspEventBlock(std::move(store), n);
}

FourVectorD PhspEventBlock::daughter(std::size_t event, std::size_t k) const {
  if (k >= n_) throw StoreError("daughter index out of range");
  const std::size_t c = 1 + 4 * k;
  return {store_.column<double>(c)[event], store_.column<double>(c + 1)[event],
          store_.column<double>(c + 2)[event], store_.column<double>(c + 3)[event]};
}

void PhspEventBlock::event(std::size_t i, std::span<FourVectorD> out) const {
  for (std::size_t k = 0; k < n_; ++k) out[k] = daughter(i, k);
}

void PhspEventBlock::set_daughter(std::size_t event, std::size_t k, const FourVectorD& p) {
  const std::size_t c = 1 + 4 * k;
  store_.mutable_column<double>(c)[event] = p.e;
  store_.mutable_column<double>(c + 1)[event] = p.px;
  store_.mutable_column<double>(c + 2)[event] = p.py;
  store_.mutable_column<double>(c + 3)[event] = p.pz;
}

double decay_at_rest(const DecaySpec& spec, CounterEngine& rng, std::span<FourVectorD> out) {
  const auto& m = spec.daughter_masses;
  const std::size_t n = m.size();

  // Intermediate masses M_k of the subsystem (0..k) from ordered uniforms.
  std::vector<double> r(n);
  r[0] = 0;
  r[n - 1] = 1;
  for (std::size_t k = 1; k + 1 < n; ++k) r[k] = rng.uniform();
  std::sort(r.begin() + 1, r.end() - 1);

  double kinetic = spec.mother_mass;
  for (double mk : m) kinetic -= mk;
  std::vector<double> inv(n);
  double running = 0;
  for (std::size_t k = 0; k < n; ++k) {
    running += m[k];
    inv[k] = r[k] * kinetic + running;
  }
  inv[n - 1] = spec.mother_mass;

  std::vector<double> pd(n - 1);
  double weight = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    pd[k] = breakup_momentum(inv[k + 1], inv[k], m[k + 1]);
    weight *= pd[k];
  }

  out[0] = {m[0], 0, 0, 0};
  for (std::size_t k = 1; k < n; ++k) {
    const double cos_theta = 2 * rng.uniform() - 1;
    const double phi = 2 * std::numbers::pi * rng.uniform();
    const double sin_theta = std::sqrt(std::max(0.0, 1 - cos_theta * cos_theta));
    const double p = pd[k - 1];
    const double nx = sin_theta * std::cos(phi);
    const double ny = sin_theta * std::sin(phi);
    const double nz = cos_theta;
    // Subsystem (0..k-1) recoils against daughter k in the rest frame of (0..k).
    const FourVectorD frame{std::sqrt(p * p + inv[k - 1] * inv[k - 1]), p * nx, p * ny, p * nz};
    for (std::size_t i = 0; i < k; ++i) out[i] = boost_into(out[i], frame);
    out[k] = {std::sqrt(p * p + m[k] * m[k]), -p * nx, -p * ny, -p * nz};
  }
  return weight;
}

PhspEventBlock phsp_generate(const DecaySpec& spec, const FourVectorD& mother, std::size_t n_events,
                             const RngKey& key, WorkerPool& pool) {
  spec.validate();
  const double m = invariant_mass(mother);
  if (!same_mass(m, spec.mother_mass)) {
    std::ostringstream os;
    os.precision(17);
    os << "mother four-vector mass " << m << " differs from the decay mass " << spec.mother_mass;
    throw KinematicsError(KinematicsError::Kind::NonPhysical, os.str());
  }
  if (!(mother.e > 0)) throw KinematicsError(KinematicsError::Kind::NonPhysical, "mother energy must be positive");

  const std::size_t n = spec.size();
  PhspEventBlock block(n, n_events);
  for_chunks(pool, n_events, [&](std::size_t begin, std::size_t end) {
    std::vector<FourVectorD> d(n);
    for (std::size_t i = begin; i < end; ++i) {
      CounterEngine rng(key.at(i));
      const double w = decay_at_rest(spec, rng, d);
      block.set_weight(i, w);
      for (std::size_t k = 0; k < n; ++k) block.set_daughter(i, k, boost_into(d[k], mother));
    }
  });
  return block;
}

double phsp_max_weight(const DecaySpec& spec) {
  spec.validate();
  const auto& m = spec.daughter_masses;
  double kinetic = spec.mother_mass;
  for (double mk : m) kinetic -= mk;
  // Factor k is largest when its parent mass sits at its upper kinematic
  // limit and its child subsystem at its lower one.
  double lo = 0;
  double hi = kinetic + m[0];
  double w = 1;
  for (std::size_t k = 1; k < m.size(); ++k) {
    lo += m[k - 1];
    hi += m[k];
    w *= breakup_momentum(hi, lo, m[k]);
  }
  return w;
}

PhspEventBlock phsp_unweight(const PhspEventBlock& block, double w_max, const RngKey& key,
                             WorkerPool& pool) {
  if (!(w_max > 0)) throw SamplingError("unweighting ceiling must be positive");
  const auto w = block.weights();
  std::vector<std::uint8_t> keep(block.size());
  for_chunks(pool, block.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (w[i] > w_max) {
        std::ostringstream os;
        os.precision(17);
        os << "event " << i << " has weight " << w[i] << " above the ceiling " << w_max;
        throw SamplingError(os.str());
      }
      keep[i] = uniform(key.at(i)) * w_max < w[i];
    }
  });
  std::size_t kept = 0;
  for (auto k : keep) kept += k;

  PhspEventBlock out(block.daughters(), kept);
  std::size_t j = 0;
  for (std::size_t i = 0; i < block.size(); ++i) {
    if (!keep[i]) continue;
    out.set_weight(j, 1.0);
    for (std::size_t k = 0; k < block.daughters(); ++k) out.set_daughter(j, k, block.daughter(i, k));
    ++j;
  }
  return out;
}

PhspEventBlock phsp_decay_chain(const PhspEventBlock& block, std::size_t daughter_index,
                                const DecaySpec& subspec, const RngKey& key, WorkerPool& pool) {
  subspec.validate();
  const std::size_t n = block.daughters();
  if (daughter_index >= n) throw StoreError("daughter index out of range");
  const std::size_t m = subspec.size();
  PhspEventBlock out(n - 1 + m, block.size());

  for_chunks(pool, block.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<FourVectorD> sub(m);
    for (std::size_t i = begin; i < end; ++i) {
      const FourVectorD parent = block.daughter(i, daughter_index);
      const double pm = invariant_mass(parent);
      if (!same_mass(pm, subspec.mother_mass)) {
        std::ostringstream os;
        os.precision(17);
        os << "event " << i << ": daughter " << daughter_index << " has mass " << pm
           << ", sub-decay expects " << subspec.mother_mass;
        throw KinematicsError(KinematicsError::Kind::NonPhysical, os.str());
      }
      CounterEngine rng(key.at(i));
      const double w = decay_at_rest(subspec, rng, sub);
      out.set_weight(i, block.weight(i) * w);
      std::size_t slot = 0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == daughter_index) {
          for (const auto& p : sub) out.set_daughter(i, slot++, boost_into(p, parent));
        } else {
          out.set_daughter(i, slot++, block.daughter(i, k));
        }
      }
    }
  });
  return out;
}

namespace {

struct WeightedSums {
  double w = 0;
  double wf = 0;
};

}  // namespace

IntegrationResult phsp_average(const Expr& f, const PhspEventBlock& block,
                               const PhspArgBuilder& args, WorkerPool& pool) {
  if (block.empty()) throw IntegrationError("phase-space average of an empty block");
  const std::size_t n = block.size();
  const auto w = block.weights();
  std::vector<double> values(n);

  const BulkEvaluationGuard guard;
  for_chunks(pool, n, [&](std::size_t begin, std::size_t end) {
    std::vector<FourVectorD> d(block.daughters());
    std::vector<double> point(f.arity());
    for (std::size_t i = begin; i < end; ++i) {
      block.event(i, d);
      args(d, point);
      const double v = f.node().eval(point);
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "event " << i << ": function value is not finite at " << format_point(point);
        throw IntegrationError(os.str());
      }
      values[i] = v;
    }
  });

  const auto sums = reduce_chunks(
      pool, n, WeightedSums{},
      [&](std::size_t begin, std::size_t end) {
        WeightedSums s;
        for (std::size_t i = begin; i < end; ++i) {
          s.w += w[i];
          s.wf += w[i] * values[i];
        }
        return s;
      },
      [](WeightedSums& acc, const WeightedSums& p) {
        acc.w += p.w;
        acc.wf += p.wf;
      });
  if (!(sums.w > 0)) throw IntegrationError("phase-space average: total weight is not positive");
  const double mean = sums.wf / sums.w;
  const double spread = reduce_chunks(
      pool, n, 0.0,
      [&](std::size_t begin, std::size_t end) {
        double s = 0;
        for (std::size_t i = begin; i < end; ++i) {
          const double dv = w[i] * (values[i] - mean);
          s += dv * dv;
        }
        return s;
      },
      [](double& acc, double p) { acc += p; });

  IntegrationResult r;
  r.value = mean;
  r.error = std::sqrt(spread) / sums.w;
  r.iterations = 1;
  r.calls_used = n;
  return r;
}

}  // namespace hepkit
