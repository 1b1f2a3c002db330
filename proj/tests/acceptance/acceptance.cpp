// Acceptance suite. Prints one PASS/FAIL line per criterion; tolerances are
// pinned below. `--suite correctness` runs criteria 1-6, `--suite scaling`
// the multi-worker speedup checks (exit 77 = skipped on small hosts).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli_app.hpp"
#include "hepkit/csv.hpp"
#include "hepkit/fitting.hpp"
#include "hepkit/integration.hpp"
#include "hepkit/phase_space.hpp"
#include "hepkit/splot.hpp"
#include "hepkit/stats.hpp"
#include "models.hpp"
#include "oracles.hpp"

using namespace hepkit;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kVegasSigmas = 3.0;
constexpr double kVegasRelError = 0.01;
constexpr double kVegasChi2 = 3.0;
constexpr double kVegasSeconds = 300;
constexpr double kConservation = 1e-9;
constexpr double kOnShell = 1e-9;
constexpr double kTwoBodyVariance = 1e-12;
constexpr double kDalitzP = 1e-3;
constexpr double kPhspSeconds = 120;
constexpr double kFitSigmas = 5.0;
constexpr double kFitSeconds = 180;
constexpr double kPullMean = 0.15;
constexpr double kPullWidthLo = 0.85;
constexpr double kPullWidthHi = 1.15;
constexpr double kWeightSum = 1e-9;
constexpr double kYieldSum = 1e-6;
constexpr double kMatrix = 1e-8;
constexpr double kKsP = 1e-3;
constexpr double kPolynomial = 1e-13;
constexpr double kSqrt = 1e-9;
constexpr double kAgreeSigmas = 3.0;
constexpr double kSpeedup = 4.0;

int failures = 0;

void line(bool ok, const char* id, const std::string& detail) {
  std::printf("%s  %-34s %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void info(const std::string& text) {
  std::printf("INFO  %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::size_t host_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

ColumnStore x_store(const std::vector<double>& x) {
  ColumnStore s(ColumnSchema::homogeneous({"x"}));
  s.resize(x.size());
  std::copy(x.begin(), x.end(), s.mutable_column<double>(0).begin());
  return s;
}

// 1. VEGAS on the 10-d Gaussian ---------------------------------------------

void criterion_vegas(WorkerPool& pool) {
  constexpr std::size_t dims = 10;
  const Expr f = wrap_closure(
      [](std::span<const double> x) {
        double s = 0;
        for (double v : x) s += (v - 0.5) * (v - 0.5);
        return std::pow(1.0 / (0.1 * std::sqrt(2 * M_PI)), 10) * std::exp(-s / (2 * 0.1 * 0.1));
      },
      dims);
  const double truth = std::pow(oracle::gaussian_mass(0.5, 0.1, 0.0, 1.0), 10);
  VegasConfig c;
  c.calls_per_iteration = 500'000;
  c.iterations = 10;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = vegas(f, BoundedRegion::cube(dims, 0.0, 1.0), c, RngKey{20260101, streams::kSampling, 0}, pool);
  const double secs = seconds_since(t0);
  const auto& v = r.result;
  const double z = std::abs(v.value - truth) / v.error;
  line(z <= kVegasSigmas, "c1.vegas.truth_within_3sigma",
       fmt("value=%.8f truth=%.8f error=%.2e |dev|/error=%.2f (<= %.0f)", v.value, truth, v.error, z, kVegasSigmas));
  line(v.error / v.value < kVegasRelError, "c1.vegas.relative_error",
       fmt("%.3e (< %.2f)", v.error / v.value, kVegasRelError));
  line(v.chi2_per_dof < kVegasChi2, "c1.vegas.chi2_per_dof", fmt("%.3f (< %.1f)", v.chi2_per_dof, kVegasChi2));
  line(secs <= kVegasSeconds, "c1.vegas.runtime", fmt("%.1f s (<= %.0f s, %zu workers)", secs, kVegasSeconds, pool.size()));
}

// 2. Phase space -----------------------------------------------------------

void criterion_phase_space(WorkerPool& pool) {
  const DecaySpec spec{1.86484, {0.493677, 0.13957, 0.13957}};
  const FourVectorD mother{spec.mother_mass, 0, 0, 0};
  constexpr std::size_t n = 1'000'000;
  const auto t0 = std::chrono::steady_clock::now();
  const auto block = phsp_generate(spec, mother, n, RngKey{77, streams::kPhaseSpace, 0}, pool);
  const double gen_secs = seconds_since(t0);

  double worst_cons = 0, worst_shell = 0;
  std::array<FourVectorD, 3> p;
  for (std::size_t i = 0; i < n; ++i) {
    block.event(i, p);
    const FourVectorD s = p[0] + p[1] + p[2];
    worst_cons = std::max({worst_cons, std::abs(s.e - mother.e) / mother.e, std::abs(s.px) / mother.e,
                           std::abs(s.py) / mother.e, std::abs(s.pz) / mother.e});
    for (std::size_t k = 0; k < 3; ++k) {
      const double m = spec.daughter_masses[k];
      worst_shell = std::max(worst_shell, std::abs(mass_squared(p[k]) - m * m) / (p[k].e * p[k].e));
    }
  }
  line(worst_cons <= kConservation, "c2.phsp.conservation", fmt("max relative deviation %.2e (<= %.0e)", worst_cons, kConservation));
  line(worst_shell <= kOnShell, "c2.phsp.on_shell", fmt("max relative |m^2 - m0^2| %.2e (<= %.0e)", worst_shell, kOnShell));

  const DecaySpec two{1.86484, {0.493677, 0.13957}};
  const auto b2 = phsp_generate(two, mother, 100'000, RngKey{78, streams::kPhaseSpace, 0}, pool);
  double mean = 0;
  for (double w : b2.weights()) mean += w;
  mean /= static_cast<double>(b2.size());
  double var = 0;
  for (double w : b2.weights()) var += (w - mean) * (w - mean);
  var /= static_cast<double>(b2.size());
  line(var / (mean * mean) <= kTwoBodyVariance, "c2.phsp.two_body_weight_variance",
       fmt("var/mean^2 = %.2e (<= %.0e)", var / (mean * mean), kTwoBodyVariance));

  const auto flat = phsp_unweight(block, phsp_max_weight(spec), RngKey{77, streams::kPhaseSpace, 1ull << 62}, pool);
  const double secs = seconds_since(t0);
  const oracle::Dalitz dz{spec.mother_mass, spec.daughter_masses[0], spec.daughter_masses[1], spec.daughter_masses[2]};
  constexpr int bins = 20;
  const double w12 = (dz.s12_max() - dz.s12_min()) / bins, w23 = (dz.s23_max() - dz.s23_min()) / bins;
  std::vector<double> counts(bins * bins, 0.0);
  std::vector<char> interior(bins * bins, 0);
  for (int a = 0; a < bins; ++a)
    for (int b = 0; b < bins; ++b) {
      const double x0 = dz.s12_min() + a * w12, y0 = dz.s23_min() + b * w23;
      interior[a * bins + b] = dz.inside(x0, y0) && dz.inside(x0 + w12, y0) && dz.inside(x0, y0 + w23) &&
                               dz.inside(x0 + w12, y0 + w23);
    }
  for (std::size_t i = 0; i < flat.size(); ++i) {
    flat.event(i, p);
    const double s12 = mass_squared(p[0] + p[1]);
    const double s23 = mass_squared(p[1] + p[2]);
    const int a = std::min(bins - 1, static_cast<int>((s12 - dz.s12_min()) / w12));
    const int b = std::min(bins - 1, static_cast<int>((s23 - dz.s23_min()) / w23));
    if (a >= 0 && b >= 0) counts[a * bins + b] += 1;
  }
  double total = 0;
  int k = 0;
  for (int i = 0; i < bins * bins; ++i)
    if (interior[i]) {
      total += counts[i];
      ++k;
    }
  const double expect = total / k;
  double chi2 = 0;
  for (int i = 0; i < bins * bins; ++i)
    if (interior[i]) chi2 += (counts[i] - expect) * (counts[i] - expect) / expect;
  const double pval = chi2_survival(chi2, k - 1);
  line(pval > kDalitzP, "c2.phsp.dalitz_flatness",
       fmt("%zu unweighted events, %d interior bins, chi2=%.1f p=%.3f (> %.0e)", flat.size(), k, chi2, pval, kDalitzP));
  line(secs <= kPhspSeconds, "c2.phsp.runtime",
       fmt("%.1f s incl. unweighting (generation %.1f s; <= %.0f s, %zu workers)", secs, gen_secs, kPhspSeconds, pool.size()));
}

// 3. Extended likelihood fit and 4. sPlot -----------------------------------

struct FittedToy {
  oracle::MixtureSample sample;
  cli::BuiltModel model;
  FitResult result;
};

void criterion_fit_and_splot(WorkerPool& pool) {
  const oracle::MixtureTruth truth;
  constexpr std::uint64_t n_sig = 300'000, n_bkg = 700'000;
  const auto sample = oracle::generate_mixture(truth, n_sig, n_bkg, 4242);
  const ColumnStore data = x_store(sample.x);
  cli::BuiltModel m = cli::build_model("gauss+exp", truth.lo, truth.hi, 1e6);
  m.params.set("mu", 4.8);
  m.params.set("sigma", 0.6);
  m.params.set("tau", 2.5);
  for (const auto& c : m.model) c.yield->set_step(1000);

  auto t0 = std::chrono::steady_clock::now();
  const FitResult r = fit(m.model, data, {"x"}, {}, pool);
  const double secs = seconds_since(t0);
  const std::vector<std::pair<const char*, double>> expected{
      {"mu", truth.mu}, {"sigma", truth.sigma}, {"tau", truth.tau}, {"n_gauss", double(n_sig)}, {"n_exp", double(n_bkg)}};
  bool all_within = r.status == FitStatus::Converged;
  std::string detail = std::string("status=") + to_string(r.status);
  for (const auto& [name, value] : expected) {
    const auto err = r.error(name);
    const double z = err ? std::abs(r.value(name) - value) / *err : INFINITY;
    all_within = all_within && z <= kFitSigmas;
    detail += fmt(" %s=%.6g(%.2fs)", name, r.value(name), z);
  }
  line(all_within, "c3.fit.single_1e6_within_5sigma", detail);
  line(secs <= kFitSeconds, "c3.fit.runtime", fmt("%.1f s, %zu calls (<= %.0f s, %zu workers)", secs, r.n_calls, kFitSeconds, pool.size()));

  // sPlot on the fitted sample: shapes frozen at the fit, yields polished.
  for (const char* s : {"mu", "sigma", "tau"}) m.params.at(s)->set_fixed(true);
  const std::vector<std::string> cols{"x"};
  splot_matrix(m.model, data, cols, pool);  // the fit itself must already be at the optimum
  const double residual = refine_yields(m.model, data, cols, pool);
  const SWeightMatrix v = splot_matrix(m.model, data, cols, pool);
  const ColumnStore w = splot_weights(m.model, data, cols, v, m.species, pool);
  const auto sw_sig = w.column<double>("sw_gauss");
  const auto sw_bkg = w.column<double>("sw_exp");
  double worst = 0, sum_sig = 0, sum_bkg = 0;
  for (std::size_t i = 0; i < sw_sig.size(); ++i) {
    worst = std::max(worst, std::abs(sw_sig[i] + sw_bkg[i] - 1.0));
    sum_sig += sw_sig[i];
    sum_bkg += sw_bkg[i];
  }
  line(worst <= kWeightSum, "c4.splot.per_event_sum", fmt("max |sum - 1| = %.2e (<= %.0e; yield residual %.1e)", worst, kWeightSum, residual));
  const double ns = m.params.value("n_gauss"), nb = m.params.value("n_exp");
  const double dev = std::max(std::abs(sum_sig - ns) / ns, std::abs(sum_bkg - nb) / nb);
  line(dev <= kYieldSum, "c4.splot.species_sums", fmt("max relative deviation %.2e (<= %.0e)", dev, kYieldSum));

  const Eigen::Matrix2d dense = oracle::dense_splot_covariance(truth, sample.x, m.params.value("mu"),
                                                               m.params.value("sigma"), m.params.value("tau"), ns, nb);
  double mdev = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) mdev = std::max(mdev, std::abs(v.covariance(i, j) - dense(i, j)) / std::abs(dense(i, j)));
  line(mdev <= kMatrix, "c4.splot.matrix_vs_dense", fmt("max relative deviation %.2e (<= %.0e)", mdev, kMatrix));

  auto ks = [&](std::span<const double> weights, auto cdf) {
    std::vector<double> wv(weights.begin(), weights.end());
    double s = 0, s2 = 0;
    for (double x : wv) {
      s += x;
      s2 += x * x;
    }
    const double d = oracle::weighted_ks_distance(sample.y, wv, cdf);
    const double neff = s * s / s2;
    return std::pair{d, kolmogorov_pvalue(d, neff)};
  };
  const auto [ds, ps] = ks(sw_sig, [&](double y) { return oracle::signal_y_cdf(truth, y); });
  line(ps > kKsP, "c4.splot.control_variable_ks", fmt("signal: D=%.2e p=%.3f (> %.0e)", ds, ps, kKsP));
  const auto [db, pb] = ks(sw_bkg, [](double y) { return y; });
  line(pb > kKsP, "c4.splot.control_variable_ks_bkg", fmt("background: D=%.2e p=%.3f (> %.0e)", db, pb, kKsP));

  // Pull study.
  constexpr int toys = 200;
  constexpr double mean_sig = 3000, mean_bkg = 7000;
  cli::BuiltModel tm = cli::build_model("gauss+exp", truth.lo, truth.hi, mean_sig + mean_bkg);
  const std::vector<double> tv{truth.mu, truth.sigma, truth.tau, mean_sig, mean_bkg};
  std::vector<std::vector<double>> pulls(tm.params.size());
  int failed = 0;
  t0 = std::chrono::steady_clock::now();
  for (int t = 0; t < toys; ++t) {
    for (std::size_t i = 0; i < tv.size(); ++i) tm.params[i]->set_value(tv[i]);
    for (const auto& c : tm.model) c.yield->set_step(std::sqrt(c.yield->value()));
    const auto s = oracle::generate_extended(truth, mean_sig, mean_bkg, 900'000 + static_cast<std::uint64_t>(t));
    const FitResult tr = fit(tm.model, x_store(s.x), {"x"}, {}, pool);
    if (tr.status != FitStatus::Converged) {
      ++failed;
      continue;
    }
    for (std::size_t i = 0; i < tv.size(); ++i) pulls[i].push_back((tr.values[i] - tv[i]) / *tr.errors[i]);
  }
  info(fmt("%d toys x %.0f expected events in %.1f s; %d fits not converged (excluded)", toys, mean_sig + mean_bkg,
           seconds_since(t0), failed));
  for (std::size_t i = 0; i < tv.size(); ++i) {
    const auto& pv = pulls[i];
    const double nn = static_cast<double>(pv.size());
    double mean = 0;
    for (double x : pv) mean += x;
    mean /= nn;
    double var = 0;
    for (double x : pv) var += (x - mean) * (x - mean);
    const double width = std::sqrt(var / (nn - 1));
    const bool ok = std::abs(mean) < kPullMean && width >= kPullWidthLo && width <= kPullWidthHi;
    const std::string id = "c3.pulls." + tm.params[i]->name();
    line(ok, id.c_str(), fmt("mean=%+.3f (|m| < %.2f) width=%.3f (in [%.2f, %.2f]) n=%zu", mean, kPullMean, width,
                             kPullWidthLo, kPullWidthHi, pv.size()));
  }
}

// 5. CLI determinism --------------------------------------------------------

void criterion_cli(const fs::path& dir) {
  const oracle::MixtureTruth truth;
  const auto sample = oracle::generate_mixture(truth, 30'000, 70'000, 555);
  const fs::path data = dir / "data.csv";
  {
    std::ofstream out(data);
    write_csv(out, x_store(sample.x));
  }
  const fs::path fit_ref = dir / "fit_ref.csv";
  std::ostringstream sink;
  const int fit_code = cli::run_cli({"fit", "--input", data.string(), "--range", "0,10", "--seed", "5", "--workers", "1",
                                     "--output", fit_ref.string()},
                                    sink, sink);
  const std::vector<std::pair<const char*, std::vector<std::string>>> commands{
      {"phsp", {"phsp", "--mother-mass", "1.86484", "--masses", "0.493677,0.13957,0.13957", "--events", "200000"}},
      {"integrate.vegas", {"integrate", "--method", "vegas", "--dim", "4", "--integrand", "gauss", "--calls", "100000", "--iterations", "5"}},
      {"integrate.plain", {"integrate", "--method", "plain", "--dim", "3", "--calls", "300000"}},
      {"fit", {"fit", "--input", data.string(), "--range", "0,10"}},
      {"toys", {"toys", "--n", "3", "--events", "20000", "--range", "0,10", "--init", "mu=5,sigma=0.5,tau=3"}},
      {"splot", {"splot", "--input", data.string(), "--range", "0,10", "--fit-result", fit_ref.string()}},
  };
  for (const auto& [name, base] : commands) {
    std::vector<std::string> outputs;
    bool ok = fit_code == 0;
    std::string codes;
    for (const char* w : {"1", "2", "8"}) {
      const fs::path out = dir / (std::string(name) + "_w" + w + ".csv");
      auto args = base;
      args.insert(args.end(), {"--seed", "5", "--workers", w, "--output", out.string()});
      std::ostringstream o, e;
      const int code = cli::run_cli(args, o, e);
      codes += std::to_string(code);
      ok = ok && code == 0;
      std::ifstream in(out, std::ios::binary);
      outputs.emplace_back(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    ok = ok && !outputs[0].empty() && outputs[0] == outputs[1] && outputs[0] == outputs[2];
    const std::string id = std::string("c5.cli.") + name;
    line(ok, id.c_str(), fmt("workers 1/2/8 byte-identical, %zu bytes, exit codes %s", outputs[0].size(), codes.c_str()));
  }
}

// 6. Quadrature -------------------------------------------------------------

void criterion_quadrature(WorkerPool& pool) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0;
  for (int degree = 0; degree <= 13; ++degree)
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<long double> c(degree + 1);
      for (auto& x : c) x = u(rng);
      const double a = u(rng) - 1.0, b = a + 0.5 + 2.0 * (u(rng) + 1.0);
      const Expr f = wrap_closure([c](std::span<const double> x) {
        return static_cast<double>(oracle::polynomial_value(c, x[0]));
      });
      const double exact = static_cast<double>(oracle::polynomial_integral(c, a, b));
      worst = std::max(worst, std::abs(gk15_static(f, a, b).value - exact) / std::max(1.0, std::abs(exact)));
    }
  line(worst <= kPolynomial, "c6.quad.gk15_polynomials", fmt("70 random polynomials, degree <= 13: max error %.2e (<= %.0e)", worst, kPolynomial));

  const auto r = gk_adaptive(wrap_closure([](std::span<const double> x) { return std::sqrt(x[0]); }), 0.0, 1.0, 1e-12, 1000);
  line(std::abs(r.value - 2.0 / 3.0) <= kSqrt, "c6.quad.adaptive_sqrt",
       fmt("|I - 2/3| = %.2e (<= %.0e), %zu intervals", std::abs(r.value - 2.0 / 3.0), kSqrt, r.iterations));

  int agree = 0;
  double worst_z = 0, rms_plain = 0, rms_vegas = 0;
  std::string outliers;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const std::size_t dims = 1 + i % 5;
    const auto g = oracle::random_integrand(dims, 1000 + i);
    const Expr f = wrap_closure([g, dims](std::span<const double> x) { return g(x.data(), dims); }, dims);
    const auto box = BoundedRegion::cube(dims, 0.0, 1.0);
    const auto p = plain_mc(f, box, 200'000, RngKey{600 + i, streams::kSampling, 0}, pool);
    VegasConfig c;
    c.calls_per_iteration = 50'000;
    c.iterations = 5;
    const auto v = vegas(f, box, c, RngKey{700 + i, streams::kSampling, 0}, pool).result;
    const double z = std::abs(p.value - v.value) / std::sqrt(p.error * p.error + v.error * v.error);
    worst_z = std::max(worst_z, z);
    if (z <= kAgreeSigmas) ++agree;
    // Each estimator against the exact value, to tell a biased error
    // estimate from an ordinary fluctuation.
    const double truth = oracle::separable_integral(g, dims);
    const double zp = (p.value - truth) / p.error, zv = (v.value - truth) / v.error;
    rms_plain += zp * zp / 20;
    rms_vegas += zv * zv / 20;
    if (z > kAgreeSigmas) outliers += fmt(" #%zu(d=%zu: plain %+.2f, vegas %+.2f sigma from truth)", std::size_t(i), dims, zp, zv);
  }
  line(agree == 20, "c6.quad.plain_vs_vegas", fmt("%d/20 integrands agree within %.0f sigma (worst %.2f)", agree, kAgreeSigmas, worst_z));
  info(fmt("c6 calibration vs exact integrals: rms pull plain %.2f, vegas %.2f;%s", std::sqrt(rms_plain),
           std::sqrt(rms_vegas), outliers.empty() ? " no outliers" : outliers.c_str()));
}

// Scaling -------------------------------------------------------------------

int scaling_suite() {
  const std::size_t hw = std::thread::hardware_concurrency();
  if (hw < 8) {
    std::printf("SKIP  scaling criteria need 8 hardware threads; this host has %zu\n", hw);
    return 77;
  }
  const oracle::MixtureTruth truth;
  const auto sample = oracle::generate_mixture(truth, 300'000, 700'000, 99);
  const ColumnStore data = x_store(sample.x);
  cli::BuiltModel m = cli::build_model("gauss+exp", truth.lo, truth.hi, 1e6);
  auto best_of = [](int repeat, const std::function<void()>& f) {
    double best = INFINITY;
    for (int r = 0; r < repeat; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      f();
      best = std::min(best, seconds_since(t0));
    }
    return best;
  };
  std::vector<double> speedup;
  double t1 = 0;
  for (std::size_t w : {1, 2, 4, 8}) {
    WorkerPool pool(w);
    const double t = best_of(5, [&] { (void)nll(m.model, data, {"x"}, pool); });
    if (w == 1) t1 = t;
    speedup.push_back(t1 / t);
    info(fmt("NLL 1e6 events, %zu workers: %.4f s, speedup %.2f", w, t, t1 / t));
  }
  const bool monotone = std::is_sorted(speedup.begin(), speedup.end());
  line(speedup.back() >= kSpeedup, "scaling.nll_speedup_8", fmt("%.2f (>= %.1f)", speedup.back(), kSpeedup));
  line(monotone, "scaling.nll_monotone", fmt("%.2f %.2f %.2f %.2f", speedup[0], speedup[1], speedup[2], speedup[3]));

  const DecaySpec spec{1.86484, {0.493677, 0.13957, 0.13957}};
  double g1 = 0, g8 = 0;
  for (std::size_t w : {1, 8}) {
    WorkerPool pool(w);
    const double t = best_of(3, [&] { (void)phsp_generate(spec, FourVectorD{spec.mother_mass, 0, 0, 0}, 1'000'000, RngKey{1, 1, 0}, pool); });
    (w == 1 ? g1 : g8) = t;
  }
  line(g1 / g8 >= kSpeedup, "scaling.phsp_throughput_8", fmt("%.2f (>= %.1f)", g1 / g8, kSpeedup));
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::string suite = "correctness";
  for (int i = 1; i + 1 < argc; ++i)
    if (std::strcmp(argv[i], "--suite") == 0) suite = argv[i + 1];
  if (suite == "scaling") return scaling_suite();
  if (suite != "correctness") {
    std::fprintf(stderr, "unknown suite '%s'\n", suite.c_str());
    return 2;
  }

  const fs::path dir = fs::temp_directory_path() / "hepkit_acceptance";
  fs::create_directories(dir);
  WorkerPool pool(host_workers());
  info(fmt("%zu worker(s)", pool.size()));
  const auto t0 = std::chrono::steady_clock::now();
  criterion_vegas(pool);
  criterion_phase_space(pool);
  criterion_fit_and_splot(pool);
  criterion_cli(dir);
  criterion_quadrature(pool);
  info(fmt("total %.1f s, %d failing criteria", seconds_since(t0), failures));
  return failures ? 1 : 0;
}
