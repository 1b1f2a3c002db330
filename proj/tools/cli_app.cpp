#include "cli_app.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "hepkit/csv.hpp"
#include "hepkit/error.hpp"
#include "hepkit/fitting.hpp"
#include "hepkit/integration.hpp"
#include "hepkit/phase_space.hpp"
#include "hepkit/random.hpp"
#include "hepkit/splot.hpp"
#include "hepkit/stats.hpp"
#include "models.hpp"

namespace hepkit::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw UsageError("invalid number '" + text + "' for " + what);
  return v;
}

std::vector<double> parse_reals(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_real(part, what));
  return out;
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto v = parse_reals(text, "--range");
  if (v.size() != 2 || !(v[0] < v[1]) || !std::isfinite(v[0]) || !std::isfinite(v[1]))
    throw UsageError("--range must be 'lo,hi' with lo < hi");
  return {v[0], v[1]};
}

/// Appends "--key=value" for every config-file entry whose flag is not on
/// the command line already.
void merge_config(std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (!path) return;
  std::ifstream in(*path);
  if (!in) throw UsageError("cannot read config file '" + *path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string flag = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (!given) args.push_back(flag + "=" + trim(line.substr(eq + 1)));
  }
}

struct Globals {
  std::size_t workers = 0;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string config;
};

struct PhspOptions {
  double mother_mass = 0;
  std::string masses;
  std::size_t events = 0;
  bool unweight = false;
};

struct IntegrateOptions {
  std::string method = "vegas";
  std::string integrand = "x2";
  std::size_t dim = 1;
  std::size_t calls = 100'000;
  std::size_t iterations = 10;
  std::size_t bins = 50;
  double alpha = 1.5;
  double lo = 0;
  double hi = 1;
  double rel_tol = 1e-10;
  std::size_t max_intervals = 1000;
};

struct FitOptions {
  std::string input;
  std::string model = "gauss+exp";
  std::string range;
  std::string column;
  std::string init;
  std::string fix;
  std::size_t max_iterations = 2000;
  double tolerance = 1e-8;
};

struct ToyOptions {
  std::size_t n = 0;
  std::size_t events = 0;
};

struct SplotOptions {
  std::string fit_result;
};

struct BenchOptions {
  std::string workers_list = "1,2,4,8";
  std::size_t events = 1'000'000;
  std::size_t repeat = 3;
};

struct HistOptions {
  std::string input;
  std::string column;
  std::string weight;
  std::size_t bins = 10;
  std::optional<double> lo;
  std::optional<double> hi;
};

struct Context {
  Globals globals;
  std::uint64_t seed = 0;
  std::ostream& err;
};

std::string pick_column(const ColumnStore& store, const std::string& requested) {
  if (!requested.empty()) {
    if (!store.schema().contains(requested)) throw UsageError("input has no column '" + requested + "'");
    return requested;
  }
  return store.schema().contains("x") ? "x" : store.schema()[0].name;
}

std::pair<double, double> data_range(const ColumnStore& store, const std::string& column) {
  const auto x = store.column<double>(column);
  if (x.empty()) throw StoreError("input has no rows");
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  double lo = *mn;
  double hi = std::nextafter(*mx, std::numeric_limits<double>::infinity());
  if (!(lo < hi)) throw StoreError("cannot infer a range from constant data");
  return {lo, hi};
}

void check_in_range(const ColumnStore& store, const std::string& column, double lo, double hi) {
  const auto x = store.column<double>(column);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] >= lo && x[i] <= hi))
      throw StoreError("event " + std::to_string(i) + " (" + format_real(x[i]) + ") is outside the fit range");
}

void apply_init(ParamSet& params, const std::string& init) {
  for (const auto& item : split(init, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--init entries must be name=value");
    const std::string name = trim(item.substr(0, eq));
    if (!params.contains(name)) throw UsageError("unknown parameter '" + name + "' in --init");
    params.at(name)->set_value(parse_real(item.substr(eq + 1), "--init " + name));
  }
}

void apply_fix(ParamSet& params, const std::string& fix) {
  for (const auto& raw : split(fix, ',')) {
    const std::string name = trim(raw);
    if (!params.contains(name)) throw UsageError("unknown parameter '" + name + "' in --fix");
    params.at(name)->set_fixed(true);
  }
}

void check_model_spec(const std::string& spec) {
  for (const auto& part : split(spec, '+'))
    if (part != "gauss" && part != "exp") throw UsageError("unknown model component '" + part + "'");
  if (spec.empty()) throw UsageError("--model must not be empty");
}

/// Yield steps scale with the statistical precision of the sample.
void set_yield_steps(const BuiltModel& m) {
  for (const auto& c : m.model) c.yield->set_step(std::max(1.0, std::sqrt(std::max(c.yield->value(), 1.0))));
}

std::string format_optional(const std::optional<double>& v) { return v ? format_real(*v) : ""; }

// phsp ---------------------------------------------------------------------

void cmd_phsp(const Context& ctx, const PhspOptions& o, WorkerPool& pool, std::ostream& body) {
  DecaySpec spec{o.mother_mass, parse_reals(o.masses, "--masses")};
  if (spec.daughter_masses.size() < 2) throw UsageError("--masses needs at least two daughters");
  spec.validate();
  const FourVectorD mother{spec.mother_mass, 0, 0, 0};
  PhspEventBlock block = phsp_generate(spec, mother, o.events, RngKey{ctx.seed, streams::kPhaseSpace, 0}, pool);
  if (o.unweight) {
    const RngKey accept{ctx.seed, streams::kPhaseSpace, std::uint64_t{1} << 62};
    block = phsp_unweight(block, phsp_max_weight(spec), accept, pool);
    ctx.err << "# kept " << block.size() << " of " << o.events << " events\n";
  }
  write_csv(body, block.store());
}

// integrate ----------------------------------------------------------------

Expr make_integrand(const std::string& name, std::size_t dim) {
  if (name == "x2")
    return wrap_closure(
        [](std::span<const double> x) {
          double s = 0;
          for (double v : x) s += v * v;
          return s;
        },
        dim);
  if (name == "gauss")
    return wrap_closure(
        [](std::span<const double> x) {
          constexpr double mean = 0.5, sigma = 0.1;
          const double norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
          double s = 0;
          double p = 1;
          for (double v : x) {
            const double z = (v - mean) / sigma;
            s += z * z;
            p *= norm;
          }
          return p * std::exp(-0.5 * s);
        },
        dim);
  throw UsageError("unknown integrand '" + name + "' (expected x2 or gauss)");
}

void cmd_integrate(const Context& ctx, const IntegrateOptions& o, WorkerPool& pool, std::ostream& body) {
  if (o.dim == 0) throw UsageError("--dim must be at least 1");
  if (!(o.lo < o.hi)) throw UsageError("--lo must be below --hi");
  const Expr f = make_integrand(o.integrand, o.dim);
  const BoundedRegion region = BoundedRegion::cube(o.dim, o.lo, o.hi);
  const RngKey key{ctx.seed, streams::kSampling, 0};

  IntegrationResult r;
  if (o.method == "gk" || o.method == "gk-adaptive") {
    if (o.dim != 1) throw UsageError("Gauss-Kronrod methods are one-dimensional; use --dim 1");
    r = o.method == "gk" ? gk15_static(f, o.lo, o.hi) : gk_adaptive(f, o.lo, o.hi, o.rel_tol, o.max_intervals);
    if (!r.converged) ctx.err << "# warning: tolerance not reached within " << o.max_intervals << " intervals\n";
  } else if (o.method == "plain") {
    if (o.calls < 2) throw UsageError("--calls must be at least 2 for plain Monte Carlo");
    r = plain_mc(f, region, o.calls, key, pool);
  } else if (o.method == "vegas") {
    VegasConfig config;
    config.calls_per_iteration = o.calls;
    config.iterations = o.iterations;
    config.bins = o.bins;
    config.alpha = o.alpha;
    if (o.iterations == 0) throw UsageError("--iterations must be at least 1");
    if (o.calls < 2 * o.bins * o.dim) throw UsageError("--calls must be at least 2 * bins * dim for VEGAS");
    auto outcome = vegas(f, region, config, key, pool);
    for (const auto& w : outcome.warnings) ctx.err << "# warning: " << w << '\n';
    r = outcome.result;
  } else {
    throw UsageError("unknown --method '" + o.method + "' (expected plain, vegas, gk or gk-adaptive)");
  }
  body << format_real(r.value) << ',' << format_real(r.error) << ',' << format_real(r.chi2_per_dof) << ','
       << r.calls_used << '\n';
}

// fit ----------------------------------------------------------------------

struct LoadedData {
  ColumnStore store;
  std::string column;
  double lo;
  double hi;
};

LoadedData load_data(const std::string& input, const std::string& column_flag, const std::string& range_flag) {
  if (input.empty()) throw UsageError("--input is required");
  LoadedData d{read_csv_file(input), "", 0, 0};
  d.column = pick_column(d.store, column_flag);
  if (range_flag.empty()) {
    std::tie(d.lo, d.hi) = data_range(d.store, d.column);
  } else {
    std::tie(d.lo, d.hi) = parse_range(range_flag);
  }
  check_in_range(d.store, d.column, d.lo, d.hi);
  return d;
}

MinimizerConfig minimizer_config(const FitOptions& o) {
  MinimizerConfig c;
  c.max_iterations = o.max_iterations;
  c.tolerance = o.tolerance;
  return c;
}

void cmd_fit(const Context&, const FitOptions& o, WorkerPool& pool, std::ostream& body) {
  check_model_spec(o.model);
  const LoadedData d = load_data(o.input, o.column, o.range);
  BuiltModel m = build_model(o.model, d.lo, d.hi, static_cast<double>(d.store.size()));
  apply_init(m.params, o.init);
  apply_fix(m.params, o.fix);
  set_yield_steps(m);

  const FitResult r = fit(m.model, d.store, {d.column}, minimizer_config(o), pool);
  body << "name,value,error,status\n";
  for (std::size_t i = 0; i < r.params.size(); ++i)
    body << r.params[i]->name() << ',' << format_real(r.values[i]) << ',' << format_optional(r.errors[i]) << ','
         << to_string(r.status) << '\n';
  body << "nll_min," << format_real(r.nll_min) << ",," << to_string(r.status) << '\n';
}

// toys ---------------------------------------------------------------------

ColumnStore generate_toy(const BuiltModel& m, std::uint64_t seed, std::size_t toy, WorkerPool& pool) {
  const std::uint64_t base = static_cast<std::uint64_t>(toy) << 36;
  CounterEngine engine(RngKey{seed, streams::kToys, base});
  ColumnStore data(ColumnSchema::homogeneous({"x"}));
  for (std::size_t k = 0; k < m.model.size(); ++k) {
    std::poisson_distribution<std::uint64_t> poisson(m.model[k].yield->value());
    const auto n = static_cast<std::size_t>(poisson(engine));
    SampleOptions opts;
    opts.columns = {"x"};
    const RngKey key{seed, streams::kToys, base + (static_cast<std::uint64_t>(k + 1) << 32)};
    const ColumnStore part = sample_pdf(m.shapes[k], m.range, n, key, opts, pool);
    const std::size_t offset = data.size();
    data.resize(offset + n);
    const auto src = part.column<double>(0);
    std::copy(src.begin(), src.end(), data.mutable_column<double>(0).begin() + static_cast<std::ptrdiff_t>(offset));
  }
  return data;
}

void cmd_toys(const Context& ctx, const FitOptions& f, const ToyOptions& o, WorkerPool& pool, std::ostream& body) {
  check_model_spec(f.model);
  if (f.range.empty()) throw UsageError("toys needs --range lo,hi");
  if (o.n == 0 || o.events == 0) throw UsageError("--n and --events must be positive");
  const auto [lo, hi] = parse_range(f.range);
  BuiltModel m = build_model(f.model, lo, hi, static_cast<double>(o.events));
  apply_init(m.params, f.init);
  apply_fix(m.params, f.fix);
  set_yield_steps(m);
  const std::vector<double> truth = m.params.values();

  body << "toy,status,nll_min";
  for (const auto& p : m.params)
    if (!p->fixed()) body << ',' << p->name() << ',' << p->name() << "_err," << p->name() << "_pull";
  body << '\n';

  std::size_t failures = 0;
  for (std::size_t t = 0; t < o.n; ++t) {
    for (std::size_t i = 0; i < m.params.size(); ++i) m.params[i]->set_value(truth[i]);
    const ColumnStore data = generate_toy(m, ctx.seed, t, pool);
    const FitResult r = fit(m.model, data, {"x"}, minimizer_config(f), pool);
    if (r.status != FitStatus::Converged) ++failures;
    body << t << ',' << to_string(r.status) << ',' << format_real(r.nll_min);
    for (std::size_t i = 0; i < r.params.size(); ++i) {
      if (r.params[i]->fixed()) continue;
      const auto& e = r.errors[i];
      const double pull = e ? (r.values[i] - truth[i]) / *e : std::numeric_limits<double>::quiet_NaN();
      body << ',' << format_real(r.values[i]) << ',' << format_optional(e) << ',' << format_real(pull);
    }
    body << '\n';
  }
  if (failures) ctx.err << "# warning: " << failures << " of " << o.n << " toy fits did not converge\n";
}

// splot --------------------------------------------------------------------

std::map<std::string, double> read_fit_result(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StoreError("cannot open fit result '" + path + "'");
  std::map<std::string, double> values;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      if (line.rfind("name,value", 0) != 0) throw StoreError("fit result '" + path + "' has no name,value header");
      header = false;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() < 2) continue;
    double v = 0;
    const auto& t = fields[1];
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) throw StoreError("bad value in fit result: " + line);
    values[fields[0]] = v;
  }
  return values;
}

void cmd_splot(const Context&, const FitOptions& f, const SplotOptions& o, WorkerPool& pool, std::ostream& body) {
  check_model_spec(f.model);
  if (o.fit_result.empty()) throw UsageError("--fit-result is required");
  const LoadedData d = load_data(f.input, f.column, f.range);
  BuiltModel m = build_model(f.model, d.lo, d.hi, static_cast<double>(d.store.size()));
  for (const auto& [name, v] : read_fit_result(o.fit_result)) {
    if (name == "nll_min") continue;
    if (!m.params.contains(name)) throw StoreError("fit result parameter '" + name + "' is not in the model");
    m.params.at(name)->set_value(v);
  }
  const std::vector<std::string> cols{d.column};
  // Rejects points off the optimum, then removes the minimizer's residual.
  splot_matrix(m.model, d.store, cols, pool);
  refine_yields(m.model, d.store, cols, pool);
  const SWeightMatrix v = splot_matrix(m.model, d.store, cols, pool);
  const ColumnStore weights = splot_weights(m.model, d.store, cols, v, m.species, pool);

  ColumnStore out = d.store;
  for (std::size_t k = 0; k < weights.column_count(); ++k) {
    const auto w = weights.column<double>(k);
    out.add_column(weights.schema()[k].name, std::vector<double>(w.begin(), w.end()));
  }
  write_csv(body, out);
}

// bench --------------------------------------------------------------------

void cmd_bench(const Context& ctx, const FitOptions& f, const BenchOptions& o, std::ostream& body) {
  check_model_spec(f.model);
  const auto [lo, hi] = f.range.empty() ? std::pair{0.0, 10.0} : parse_range(f.range);
  std::vector<std::size_t> workers;
  for (const auto& w : split(o.workers_list, ',')) {
    const double v = parse_real(w, "--workers-list");
    if (!(v >= 1) || v != std::floor(v)) throw UsageError("--workers-list entries must be positive integers");
    workers.push_back(static_cast<std::size_t>(v));
  }
  if (workers.empty() || o.repeat == 0 || o.events == 0) throw UsageError("bench needs workers, events and repeat");

  BuiltModel m = build_model(f.model, lo, hi, static_cast<double>(o.events));
  apply_init(m.params, f.init);
  ColumnStore data(ColumnSchema::homogeneous({"x"}));
  {
    WorkerPool gen(workers.back());
    data = generate_toy(m, ctx.seed, 0, gen);
  }

  body << "workers,wall_seconds,speedup\n";
  std::optional<double> base;
  for (std::size_t w : workers) {
    WorkerPool pool(w);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < o.repeat; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const double v = nll(m.model, data, {"x"}, pool);
      const auto t1 = std::chrono::steady_clock::now();
      if (!std::isfinite(v)) throw FitError("benchmark NLL is not finite");
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    if (!base && w == 1) base = best;
    const double speedup = base ? *base / best : std::numeric_limits<double>::quiet_NaN();
    body << w << ',' << format_real(best) << ',' << format_real(speedup) << '\n';
  }
}

// hist ---------------------------------------------------------------------

void cmd_hist(const HistOptions& o, std::ostream& body) {
  if (o.input.empty()) throw UsageError("--input is required");
  if (o.bins == 0) throw UsageError("--bins must be at least 1");
  const ColumnStore store = read_csv_file(o.input);
  if (!store.schema().contains(o.column)) throw StoreError("unknown column '" + o.column + "'");
  if (!o.weight.empty() && !store.schema().contains(o.weight))
    throw StoreError("unknown weight column '" + o.weight + "'");
  double lo, hi;
  if (o.lo && o.hi) {
    lo = *o.lo;
    hi = *o.hi;
  } else {
    const auto r = data_range(store, o.column);
    lo = o.lo.value_or(r.first);
    hi = o.hi.value_or(r.second);
  }
  if (!(lo < hi)) throw UsageError("histogram range needs lo < hi");

  Histogram h(o.bins, lo, hi);
  const auto x = store.column<double>(o.column);
  for (std::size_t i = 0; i < x.size(); ++i) h.fill(x[i], o.weight.empty() ? 1.0 : store.column<double>(o.weight)[i]);
  body << "bin_center,value,error\n";
  for (std::size_t b = 0; b < h.bins(); ++b)
    body << format_real(h.bin_lower(b) + 0.5 * h.bin_width()) << ',' << format_real(h.sum_w[b]) << ','
         << format_real(std::sqrt(h.sum_w2[b])) << '\n';
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

void print_resolved(std::ostream& err, const CLI::App& app, const CLI::App& sub, std::uint64_t seed) {
  err << "# hepkit " << sub.get_name() << " seed=" << seed;
  auto dump = [&](const CLI::App& a) {
    for (const CLI::Option* opt : a.get_options()) {
      const std::string name = opt->get_single_name();
      if (name == "help" || name == "seed" || name.empty()) continue;
      std::string value;
      if (opt->count() > 0) {
        const auto& res = opt->results();
        for (std::size_t i = 0; i < res.size(); ++i) value += (i ? "," : "") + res[i];
      } else {
        value = opt->get_default_str();
      }
      err << ' ' << name << '=' << value;
    }
  };
  dump(app);
  dump(sub);
  err << '\n';
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err, std::optional<bool> interactive) {
  try {
    merge_config(args);

    CLI::App app{"hepkit: data-parallel statistical analysis toolkit"};
    app.fallthrough();
    app.require_subcommand(1);
    Globals g;
    app.add_option("--workers", g.workers, "worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--seed", g.seed, "64-bit random seed");
    app.add_option("--output", g.output, "write CSV here instead of stdout");
    app.add_option("--config", g.config, "key=value file; command-line flags take precedence");

    PhspOptions ph;
    auto* phsp = app.add_subcommand("phsp", "generate n-body phase-space events");
    phsp->add_option("--mother-mass", ph.mother_mass)->required();
    phsp->add_option("--masses", ph.masses, "comma-separated daughter masses")->required();
    phsp->add_option("--events", ph.events)->required();
    phsp->add_flag("--unweight", ph.unweight, "accept-reject to unit weights");

    IntegrateOptions io;
    auto* integ = app.add_subcommand("integrate", "integrate a built-in function over a box");
    integ->add_option("--method", io.method)->capture_default_str();
    integ->add_option("--integrand", io.integrand, "x2 (sum of squares) or gauss (product Gaussian)")
        ->capture_default_str();
    integ->add_option("--dim", io.dim)->capture_default_str();
    integ->add_option("--calls", io.calls)->capture_default_str();
    integ->add_option("--iterations", io.iterations)->capture_default_str();
    integ->add_option("--bins", io.bins)->capture_default_str();
    integ->add_option("--alpha", io.alpha)->capture_default_str();
    integ->add_option("--lo", io.lo)->capture_default_str();
    integ->add_option("--hi", io.hi)->capture_default_str();
    integ->add_option("--rel-tol", io.rel_tol)->capture_default_str();
    integ->add_option("--max-intervals", io.max_intervals)->capture_default_str();

    FitOptions fo;
    auto add_model_options = [&fo](CLI::App* sub, bool with_input) {
      if (with_input) {
        sub->add_option("--input", fo.input)->required();
        sub->add_option("--column", fo.column, "observable column (default x, else the first)");
      }
      sub->add_option("--model", fo.model)->capture_default_str();
      sub->add_option("--range", fo.range, "lo,hi");
      sub->add_option("--init", fo.init, "name=value,...");
      sub->add_option("--fix", fo.fix, "name,...");
      sub->add_option("--max-iterations", fo.max_iterations)->capture_default_str();
      sub->add_option("--tolerance", fo.tolerance)->capture_default_str();
    };
    auto* fitc = app.add_subcommand("fit", "extended unbinned maximum-likelihood fit");
    add_model_options(fitc, true);

    ToyOptions to;
    auto* toys = app.add_subcommand("toys", "generate and fit pseudo-experiments");
    add_model_options(toys, false);
    toys->add_option("--n", to.n, "number of toys")->required();
    toys->add_option("--events", to.events, "expected events per toy")->required();

    SplotOptions so;
    auto* splot = app.add_subcommand("splot", "compute sWeights from a fit result");
    add_model_options(splot, true);
    splot->add_option("--fit-result", so.fit_result)->required();

    BenchOptions bo;
    auto* bench = app.add_subcommand("bench", "time NLL evaluation against worker count");
    add_model_options(bench, false);
    bench->add_option("--workers-list", bo.workers_list)->capture_default_str();
    bench->add_option("--events", bo.events)->capture_default_str();
    bench->add_option("--repeat", bo.repeat)->capture_default_str();

    HistOptions ho;
    auto* hist = app.add_subcommand("hist", "histogram one column as CSV");
    hist->add_option("--input", ho.input)->required();
    hist->add_option("--column", ho.column)->required();
    hist->add_option("--weight", ho.weight, "weight column (e.g. an sWeight)");
    hist->add_option("--bins", ho.bins)->capture_default_str();
    hist->add_option("--lo", ho.lo);
    hist->add_option("--hi", ho.hi);

    try {
      std::vector<std::string> reversed(args.rbegin(), args.rend());
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err << "hepkit: usage error: " << one_line(e.what()) << '\n';
      return kExitUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    const bool randomized = name == "phsp" || name == "toys" || name == "bench" ||
                            (name == "integrate" && (io.method == "plain" || io.method == "vegas"));
    const bool tty = interactive.value_or(::isatty(STDIN_FILENO) != 0);
    if (!g.seed && randomized && !tty) throw UsageError("--seed is required when not running interactively");
    Context ctx{g, g.seed.value_or(0), err};
    print_resolved(err, app, *sub, ctx.seed);

    WorkerPool pool(g.workers);
    std::ostringstream body;
    if (name == "phsp") cmd_phsp(ctx, ph, pool, body);
    else if (name == "integrate") cmd_integrate(ctx, io, pool, body);
    else if (name == "fit") cmd_fit(ctx, fo, pool, body);
    else if (name == "toys") cmd_toys(ctx, fo, to, pool, body);
    else if (name == "splot") cmd_splot(ctx, fo, so, pool, body);
    else if (name == "bench") cmd_bench(ctx, fo, bo, body);
    else cmd_hist(ho, body);

    if (g.output.empty()) {
      out << body.str();
    } else {
      std::ofstream file(g.output, std::ios::binary);
      file << body.str();
      if (!file.flush()) throw StoreError("cannot write '" + g.output + "'");
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "hepkit: usage error: " << one_line(e.what()) << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "hepkit: error: " << one_line(e.what()) << '\n';
    return kExitDomain;
  }
}

}  // namespace hepkit::cli
