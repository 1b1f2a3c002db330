#include "models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace hepkit::cli {

namespace {

std::vector<std::string> split_plus(const std::string& spec) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = spec.find('+', start);
    out.push_back(spec.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

BuiltModel build_model(const std::string& spec, double lo, double hi, double expected_events) {
  const BoundedRegion range{{lo, hi}};
  const double w = hi - lo;
  const auto names = split_plus(spec);

  std::map<std::string, int> seen;
  std::vector<std::string> species;
  std::vector<Expr> shapes;
  std::vector<Pdf> pdfs;
  std::vector<ParamRef> yields;
  const double n0 = std::max(expected_events, 1.0) / static_cast<double>(names.size());

  for (const auto& name : names) {
    if (name != "gauss" && name != "exp") throw std::invalid_argument("unknown model component '" + name + "'");
    const int count = ++seen[name];
    const std::string suffix = count == 1 ? "" : "_" + std::to_string(count);
    species.push_back(name + suffix);
    if (name == "gauss") {
      auto mu = make_parameter("mu" + suffix, lo + 0.5 * w, 0.05 * w, lo, hi);
      auto sigma = make_parameter("sigma" + suffix, 0.1 * w, 0.02 * w, 1e-3 * w, w);
      shapes.push_back(gaussian(mu, sigma));
      pdfs.push_back(make_pdf(shapes.back(), gaussian_integral(mu, sigma), range));
    } else {
      auto tau = make_parameter("tau" + suffix, 0.5 * w, 0.1 * w, 1e-3 * w, 1e3 * w);
      shapes.push_back(exponential(tau));
      pdfs.push_back(make_pdf(shapes.back(), exponential_integral(tau), range));
    }
    yields.push_back(make_parameter("n_" + species.back(), n0, std::max(1.0, std::sqrt(n0)), 0.0,
                                    std::max(10.0 * expected_events, 100.0)));
  }

  ExtendedModel model = add_pdfs(yields, pdfs);
  ParamSet params = model.parameters();
  return BuiltModel{std::move(model), std::move(species), std::move(shapes), std::move(params), range};
}

}  // namespace hepkit::cli
