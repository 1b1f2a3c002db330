#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hepkit/column_store.hpp"
#include "hepkit/functor.hpp"
#include "hepkit/parallel.hpp"
#include "hepkit/region.hpp"

namespace hepkit {

/// Stream tags used by the library's randomized subsystems.
namespace streams {
inline constexpr std::uint64_t kSampling = 0;
inline constexpr std::uint64_t kPhaseSpace = 1;
inline constexpr std::uint64_t kToys = 2;
}  // namespace streams

/// Address of a random sequence: (seed, stream) selects an independent
/// generator, counter selects the event or draw within it.
struct RngKey {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t counter = 0;

  /// Same seed and stream, counter advanced by `offset`.
  RngKey at(std::uint64_t offset) const noexcept { return {seed, stream, counter + offset}; }
  friend bool operator==(const RngKey&, const RngKey&) = default;
};

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based engine: the j-th output for a key is a pure function of
/// (key, j). Satisfies UniformRandomBitGenerator.
class CounterEngine {
 public:
  using result_type = std::uint64_t;

  explicit CounterEngine(const RngKey& key) noexcept;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept;

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// Standard normal via Box-Muller on two consecutive uniforms (cosine branch).
  double gaussian() noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

double uniform(const RngKey& key) noexcept;
double gaussian_deviate(const RngKey& key) noexcept;

/// Points of the additive R_d quasi-random sequence mapped into region.
std::vector<Eigen::VectorXd> quasi_random_points(const BoundedRegion& region, std::size_t n);

/// 1.1 times the largest value of expr found on a 10^4-point quasi-random scan.
double estimate_ceiling(const Expr& expr, const BoundedRegion& region);

/// Column names used when sample_pdf is not given any: "x" in one
/// dimension, "x0".."x{d-1}" otherwise.
std::vector<std::string> default_sample_columns(std::size_t dims);

struct SampleOptions {
  /// Must bound expr on the region; estimated when absent.
  std::optional<double> ceiling;
  std::vector<std::string> columns;
  /// Proposals allowed per accepted event before giving up.
  std::uint64_t max_proposals = 100'000'000;
};

/// Draws n points distributed as expr over region by accept-reject against
/// a uniform proposal. Event i consumes only the sequence keyed by
/// key.at(i), so the output does not depend on the pool size.
/// A proposal above the ceiling aborts with SamplingError.
ColumnStore sample_pdf(const Expr& expr, const BoundedRegion& region, std::size_t n,
                       const RngKey& key, const SampleOptions& options = {},
                       WorkerPool& pool = serial_pool());

}  // namespace hepkit
