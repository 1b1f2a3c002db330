#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"
#include "hepkit/csv.hpp"
#include "hepkit/kinematics.hpp"
#include "hepkit/phase_space.hpp"
#include "hepkit/random.hpp"

using namespace hepkit;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args, bool interactive = false) {
  std::ostringstream out, err;
  const int code = cli::run_cli(std::move(args), out, err, interactive);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hepkit_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("phsp emits the event block schema with conserved momenta") {
  const Run r = run({"phsp", "--mother-mass", "1.0", "--masses", "0.1,0.1,0.1", "--events", "1000", "--seed", "7"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  const ColumnStore store = read_csv(in, phsp_schema(3));
  const auto block = PhspEventBlock::from_store(store);
  REQUIRE(block.size() == 1000);
  for (std::size_t i = 0; i < block.size(); ++i) {
    FourVectorD s{0, 0, 0, 0};
    for (std::size_t k = 0; k < 3; ++k) s += block.daughter(i, k);
    CHECK(std::abs(s.e - 1.0) < 1e-9);
    CHECK(std::abs(s.px) < 1e-9);
  }
  CHECK(r.err.find("seed=7") != std::string::npos);
}

TEST_CASE("integrate with gauss-kronrod") {
  const Run r = run({"integrate", "--method", "gk", "--calls", "0"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("0.33333333333333", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), ',') == 3);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == 2);
  CHECK(run({"nosuch"}).code == 2);
  CHECK(run({"phsp", "--events", "10", "--seed", "1"}).code == 2);
  CHECK(run({"integrate", "--method", "simpson", "--seed", "1"}).code == 2);
  CHECK(run({"integrate", "--method", "gk", "--dim", "2"}).code == 2);
  const Run below = run({"phsp", "--mother-mass", "0.2", "--masses", "0.1,0.1,0.1", "--events", "10", "--seed", "1"});
  CHECK(below.code == 1);
  CHECK(std::count(below.err.begin(), below.err.end(), '\n') == 2);  // resolved config + one diagnostic
  CHECK(run({"fit", "--input", scratch("missing.csv").string(), "--seed", "1"}).code == 1);
  CHECK(run({"hist", "--input", scratch("missing.csv").string(), "--column", "x"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("randomized subcommands need a seed unless interactive") {
  const std::vector<std::string> args{"phsp", "--mother-mass", "1", "--masses", "0.1,0.1", "--events", "3"};
  CHECK(run(args, false).code == 2);
  const Run r = run(args, true);
  CHECK(r.code == 0);
  CHECK(r.err.find("seed=0") != std::string::npos);
  // Deterministic gk needs no seed.
  CHECK(run({"integrate", "--method", "gk"}, false).code == 0);
}

TEST_CASE("config file values apply unless overridden") {
  const fs::path cfg = scratch("run.cfg");
  std::ofstream(cfg) << "# phase space run\nmother-mass = 1.0\nmasses=0.1,0.2\nevents=5\nseed=3\n";
  const Run a = run({"phsp", "--config", cfg.string()});
  REQUIRE(a.code == 0);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 6);
  const Run b = run({"phsp", "--config", cfg.string(), "--events", "2"});
  REQUIRE(b.code == 0);
  CHECK(std::count(b.out.begin(), b.out.end(), '\n') == 3);
  std::ofstream(cfg) << "broken line\n";
  CHECK(run({"phsp", "--config", cfg.string()}).code == 2);
}

TEST_CASE("outputs do not depend on worker count") {
  const std::vector<std::vector<std::string>> commands{
      {"phsp", "--mother-mass", "1.0", "--masses", "0.1,0.2,0.3", "--events", "9000", "--unweight"},
      {"integrate", "--method", "vegas", "--dim", "2", "--integrand", "gauss", "--calls", "20000", "--iterations",
       "3"},
      {"integrate", "--method", "plain", "--dim", "3", "--calls", "50000"},
      {"toys", "--n", "2", "--events", "3000", "--range", "0,10", "--init", "mu=5,sigma=0.5,tau=3"},
  };
  for (const auto& base : commands) {
    std::string reference;
    for (const char* w : {"1", "2", "8"}) {
      auto args = base;
      args.insert(args.end(), {"--seed", "11", "--workers", w});
      const Run r = run(args);
      REQUIRE(r.code == 0);
      if (reference.empty()) reference = r.out;
      CHECK(r.out == reference);
    }
  }
}

TEST_CASE("fit, splot and hist pipeline") {
  const fs::path data = scratch("data.csv");
  const fs::path fitres = scratch("fit.csv");
  const fs::path sw = scratch("sw.csv");
  std::ofstream out(data);
  out << "x,y\n";
  CounterEngine rng(RngKey{77, 0, 0});
  for (int i = 0; i < 3000; ++i) {
    const bool sig = i % 3 == 0;
    const double x = sig ? 5.0 + 0.5 * rng.gaussian() : -3.0 * std::log1p(-rng.uniform() * (1 - std::exp(-10.0 / 3)));
    if (x < 0 || x > 10) continue;
    out << format_real(x) << ',' << format_real(rng.uniform()) << '\n';
  }
  out.close();

  const Run f = run({"fit", "--input", data.string(), "--range", "0,10", "--init", "mu=4.8,sigma=0.7,tau=2.5",
                     "--output", fitres.string()});
  REQUIRE(f.code == 0);
  const std::string fit_csv = slurp(fitres);
  CHECK(fit_csv.rfind("name,value,error,status\n", 0) == 0);
  CHECK(fit_csv.find("\nnll_min,") != std::string::npos);
  CHECK(fit_csv.find(",Converged\n") != std::string::npos);

  std::string first;
  for (const char* w : {"1", "2", "8"}) {
    const Run s = run({"splot", "--input", data.string(), "--range", "0,10", "--fit-result", fitres.string(),
                       "--workers", w});
    REQUIRE(s.code == 0);
    if (first.empty()) first = s.out;
    CHECK(s.out == first);
  }
  CHECK(first.rfind("x,y,sw_gauss,sw_exp\n", 0) == 0);
  std::ofstream(sw) << first;

  const Run h = run({"hist", "--input", sw.string(), "--column", "x", "--bins", "1", "--lo", "0", "--hi", "10.5"});
  REQUIRE(h.code == 0);
  const auto lines = std::count(first.begin(), first.end(), '\n') - 1;
  CHECK(h.out == "bin_center,value,error\n5.25," + std::to_string(lines) + "," +
                     format_real(std::sqrt(static_cast<double>(lines))) + "\n");
  const Run hw = run({"hist", "--input", sw.string(), "--column", "y", "--weight", "sw_gauss", "--bins", "4"});
  CHECK(hw.code == 0);
  CHECK(run({"hist", "--input", sw.string(), "--column", "nope"}).code == 1);

  // Yields moved off the optimum are refused.
  std::string shifted = fit_csv;
  const auto pos = shifted.find("n_gauss,");
  REQUIRE(pos != std::string::npos);
  shifted.replace(pos, shifted.find(',', pos + 8) - pos, "n_gauss,10");
  std::ofstream(fitres) << shifted;
  CHECK(run({"splot", "--input", data.string(), "--range", "0,10", "--fit-result", fitres.string()}).code == 1);
}

TEST_CASE("bench reports unit speedup for one worker") {
  const Run r = run({"bench", "--workers-list", "1", "--events", "20000", "--repeat", "2", "--seed", "3"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("workers,wall_seconds,speedup\n1,", 0) == 0);
  CHECK(r.out.size() > 4);
  CHECK(r.out.substr(r.out.rfind(',') + 1) == "1\n");
  CHECK(run({"bench", "--workers-list", "0", "--seed", "3"}).code == 2);
}
