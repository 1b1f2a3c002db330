#include "hepkit/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hepkit/error.hpp"

namespace hepkit {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

// Counter words: (counter lo, counter hi, block index, stream lo). The high
// half of the stream tag is folded into the key so every 64-bit stream is
// accepted; streams below 2^32 never collide.
CounterEngine::CounterEngine(const RngKey& key) noexcept
    : key_{static_cast<std::uint32_t>(key.seed),
           static_cast<std::uint32_t>(key.seed >> 32) ^ static_cast<std::uint32_t>(key.stream >> 32)},
      ctr_{static_cast<std::uint32_t>(key.counter), static_cast<std::uint32_t>(key.counter >> 32), 0u,
           static_cast<std::uint32_t>(key.stream)} {}

CounterEngine::result_type CounterEngine::operator()() noexcept {
  if (available_ == 0) {
    const auto r = philox4x32(ctr_, key_);
    ++ctr_[2];
    buffer_[0] = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
    buffer_[1] = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
    available_ = 2;
  }
  return buffer_[2 - available_--];
}

double CounterEngine::gaussian() noexcept {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double uniform(const RngKey& key) noexcept { return CounterEngine(key).uniform(); }

double gaussian_deviate(const RngKey& key) noexcept { return CounterEngine(key).gaussian(); }

std::vector<Eigen::VectorXd> quasi_random_points(const BoundedRegion& region, std::size_t n) {
  const std::size_t d = region.dims();
  // phi_d solves x^(d+1) = x + 1; alpha_j = phi_d^-(j+1).
  double phi = 2.0;
  for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / static_cast<double>(d + 1));
  Eigen::VectorXd alpha(static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j)
    alpha[static_cast<Eigen::Index>(j)] = std::fmod(std::pow(1.0 / phi, static_cast<double>(j + 1)), 1.0);

  std::vector<Eigen::VectorXd> out;
  out.reserve(n);
  const Eigen::VectorXd width = region.upper() - region.lower();
  for (std::size_t k = 0; k < n; ++k) {
    Eigen::VectorXd u = (0.5 + static_cast<double>(k + 1) * alpha.array()).unaryExpr(
        [](double v) { return v - std::floor(v); });
    out.push_back(region.lower() + width.cwiseProduct(u));
  }
  return out;
}

double estimate_ceiling(const Expr& expr, const BoundedRegion& region) {
  double best = 0;
  for (const auto& p : quasi_random_points(region, 10'000))
    best = std::max(best, expr(std::span<const double>(p.data(), static_cast<std::size_t>(p.size()))));
  if (!(best > 0)) throw SamplingError("function is not positive anywhere on the scanned region");
  return 1.1 * best;
}

std::vector<std::string> default_sample_columns(std::size_t dims) {
  if (dims == 1) return {"x"};
  std::vector<std::string> names;
  for (std::size_t i = 0; i < dims; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

ColumnStore sample_pdf(const Expr& expr, const BoundedRegion& region, std::size_t n,
                       const RngKey& key, const SampleOptions& options, WorkerPool& pool) {
  const std::size_t d = region.dims();
  if (expr.arity() != d)
    throw SamplingError("expression arity " + std::to_string(expr.arity()) +
                        " does not match region dimension " + std::to_string(d));
  const auto names = options.columns.empty() ? default_sample_columns(d) : options.columns;
  if (names.size() != d) throw SamplingError("need one column name per dimension");
  const double ceiling = options.ceiling ? *options.ceiling : estimate_ceiling(expr, region);
  if (!(ceiling > 0) || !std::isfinite(ceiling)) throw SamplingError("ceiling must be positive and finite");

  ColumnStore store(ColumnSchema::homogeneous(names));
  store.resize(n);
  std::vector<std::span<double>> cols;
  for (std::size_t j = 0; j < d; ++j) cols.push_back(store.mutable_column<double>(j));

  const BulkEvaluationGuard guard;
  for_chunks(pool, n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(d);
    for (std::size_t i = begin; i < end; ++i) {
      CounterEngine rng(key.at(i));
      std::uint64_t tries = 0;
      for (;;) {
        if (++tries > options.max_proposals)
          throw SamplingError("event " + std::to_string(i) + ": no proposal accepted after " +
                              std::to_string(options.max_proposals) + " tries");
        for (std::size_t j = 0; j < d; ++j)
          x[j] = region.lower(j) + region.width(j) * rng.uniform();
        const double u = rng.uniform();
        const double f = expr.node().eval(x);
        if (!(f >= 0) || !std::isfinite(f))
          throw SamplingError("function value " + std::to_string(f) + " is not a valid density at " +
                              format_point(x));
        if (f > ceiling) {
          std::ostringstream os;
          os.precision(17);
          os << "ceiling " << ceiling << " exceeded: f = " << f << " at " << format_point(x);
          throw SamplingError(os.str());
        }
        if (u * ceiling < f) break;
      }
      for (std::size_t j = 0; j < d; ++j) cols[j][i] = x[j];
    }
  });
  return store;
}

}  // namespace hepkit
