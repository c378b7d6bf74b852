#include "loewner_cli/suite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "loewner/driver.hpp"
#include "loewner/error.hpp"
#include "loewner/map_chain.hpp"
#include "loewner/parallel.hpp"
#include "loewner/rng.hpp"

namespace loewner::cli {

namespace {

using bounds::BoundReport;

double uniform(GaussianStream& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

// Random walk through 2, 4 or 8 nodes on [0, 1], rescaled so that I_D <= max_energy,
// resampled onto `steps`.
Driver random_pwl_driver(GaussianStream& rng, std::size_t steps, double max_energy) {
  static constexpr std::size_t kNodeChoices[] = {2, 4, 8};
  const std::size_t nodes = kNodeChoices[static_cast<std::size_t>(rng.uniform() * 3.0) % 3];
  const double sigma = uniform(rng, 0.2, 1.5);
  std::vector<double> v(nodes + 1, 0.0);
  for (std::size_t k = 1; k <= nodes; ++k) v[k] = v[k - 1] + sigma * rng.normal() / std::sqrt(double(nodes));
  auto coarse = Driver::make(v, 1.0);
  const double energy = dirichlet_energy(coarse).value();
  const double target = uniform(rng, 0.0, max_energy);
  if (energy > 0.0) coarse = scaled(coarse, std::sqrt(target / energy));
  std::vector<double> fine(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) fine[k] = coarse.at(double(k) / double(steps));
  fine.back() = coarse.values().back();
  return Driver::make(std::move(fine), 1.0);
}

Complex random_point(GaussianStream& rng, double x_span, double y_lo, double y_hi) {
  return {uniform(rng, -x_span, x_span), uniform(rng, y_lo, y_hi)};
}

std::string instance_id(const std::string& bound, std::size_t i) { return bound + "#" + std::to_string(i); }

BoundReport run_instance(const std::string& bound, std::size_t i, GaussianStream& rng, const SuiteOptions& o) {
  const std::string id = instance_id(bound, i);
  const double t_grid[] = {0.25, 0.5, 1.0};
  const double y_grid[] = {0.05, 0.2, 1.0};
  if (bound == "continuity") {
    const auto a = random_pwl_driver(rng, o.steps, 2.0);
    const auto b = random_pwl_driver(rng, o.steps, 2.0);
    return bounds::check_continuity_bound(a, b, y_grid, t_grid, i % 2 == 1, id);
  }
  if (bound == "derivative_energy") {
    const auto d = random_pwl_driver(rng, o.steps, 3.0);
    return bounds::check_derivative_energy_bound(d, y_grid, t_grid, id);
  }
  if (bound == "tip_distance") {
    const auto d = random_pwl_driver(rng, o.steps, 2.0);
    const double c = dirichlet_energy(d).value() * uniform(rng, 1.0, 2.0);
    return bounds::check_tip_distance_bound(d, c, uniform(rng, 0.02, 0.5), id);
  }
  if (bound == "koebe") {
    const auto chain = MapChain::build(random_pwl_driver(rng, o.steps, 3.0));
    const double t = double(1 + static_cast<std::size_t>(rng.uniform() * double(o.steps))) / double(o.steps);
    const Complex z = random_point(rng, 2.0, 0.05, 2.0);
    const double r = uniform(rng, 0.0, 0.95);
    const double rho = r * z.imag() * rng.uniform();
    const double theta = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const Complex w = z + std::polar(rho, theta);
    return bounds::check_koebe(chain, std::min(t, 1.0), z, w, r, id);
  }
  if (bound == "rectangle_distortion") {
    const auto chain = MapChain::build(random_pwl_driver(rng, o.steps, 3.0));
    const double y = uniform(rng, 0.02, 1.0);
    const Complex z1 = random_point(rng, 1.0, y, 1.0);
    const Complex z2 = random_point(rng, 1.0, y, 1.0);
    const bounds::RectanglePlacement place{uniform(rng, -1.0, 1.0), uniform(rng, 0.1, 2.0)};
    return bounds::check_rectangle_distortion(chain, 1.0, z1, z2, y, place, {}, id);
  }
  if (bound == "dyadic_implication") {
    const auto steps = static_cast<std::size_t>(1) << (2 * o.dyadic_m_max);
    const auto d = i % 2 == 0 ? random_pwl_driver(rng, steps, 3.0)
                              : sample_brownian_driver(uniform(rng, 0.05, 0.8), 1.0, steps,
                                                       mix_seed(o.seed, (std::uint64_t{1} << 40) + i));
    return bounds::check_dyadic_implication(d, o.beta, o.dyadic_n, o.dyadic_m_max, {}, id);
  }
  throw InvalidArgument("unknown bound id: " + bound);
}

}  // namespace

const std::vector<std::string>& bound_ids() {
  static const std::vector<std::string> ids = {"continuity",          "derivative_energy",   "tip_distance",
                                               "koebe",               "rectangle_distortion", "dyadic_implication"};
  return ids;
}

std::vector<SuiteEntry> run_bound_suite(const SuiteOptions& options) {
  if (options.instances == 0) throw InvalidArgument("bound suite needs at least one instance");
  if (options.steps < 2) throw InvalidArgument("bound suite needs at least two driver steps");
  if (options.dyadic_n < 0 || options.dyadic_m_max < options.dyadic_n || options.dyadic_m_max > 7)
    throw InvalidArgument("dyadic levels must satisfy 0 <= n <= m_max <= 7");
  const auto& all = bound_ids();
  const auto selected = options.bounds.empty() ? all : options.bounds;
  for (const auto& b : selected)
    if (std::find(all.begin(), all.end(), b) == all.end()) throw InvalidArgument("unknown bound id: " + b);

  std::vector<SuiteEntry> entries;
  for (const auto& bound : selected) {
    const auto b = static_cast<std::uint64_t>(std::find(all.begin(), all.end(), bound) - all.begin());
    std::vector<BoundReport> reports(options.instances);
    parallel_for(options.instances, options.threads, [&](std::size_t i) {
      GaussianStream rng(mix_seed(options.seed, b * options.instances + i));
      reports[i] = run_instance(bound, i, rng, options);
    });
    SuiteEntry entry;
    entry.merged = bounds::merge(reports);
    entry.instances = reports.size();
    for (const auto& r : reports) {
      entry.failed += r.pass ? 0 : 1;
      entry.hypothesis_held += r.hypothesis_satisfied ? 1 : 0;
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace loewner::cli
