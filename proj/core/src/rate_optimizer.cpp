#include "loewner/rate_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <sstream>

#include "loewner/csv_io.hpp"
#include "loewner/error.hpp"
#include "loewner/map_chain.hpp"
#include "loewner/parallel.hpp"
#include "loewner/rng.hpp"

namespace loewner::opt {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

std::string describe(const Constraint& constraint) {
  std::ostringstream s;
  std::visit(overloaded{
                 [&](const TubeMembership& c) { s << "tube(r=" << format_double(c.radius) << ")"; },
                 [&](const Endpoint& c) {
                   s << "endpoint(z=" << format_double(c.point.real()) << (c.point.imag() < 0 ? "" : "+")
                     << format_double(c.point.imag()) << "i;tol=" << format_double(c.tolerance) << ")";
                 },
                 [&](const AvoidDisk& c) {
                   s << "avoid_disk(c=" << format_double(c.center.real()) << (c.center.imag() < 0 ? "" : "+")
                     << format_double(c.center.imag()) << "i;r=" << format_double(c.radius) << ")";
                 },
             },
             constraint);
  return s.str();
}

PenaltyProblem::PenaltyProblem(Constraint constraint, std::size_t segments, const Options& options)
    : constraint_(std::move(constraint)), segments_(segments), trace_steps_(options.trace_steps),
      horizon_(options.horizon), fd_step_(options.fd_step) {
  if (segments < 2) throw InvalidArgument("need at least two driver segments");
  if (!(options.fd_step > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  std::visit(overloaded{
                 [&](const TubeMembership& c) {
                   if (!(c.radius > 0.0)) throw InvalidArgument("tube radius must be positive");
                   trace_steps_ = c.target.size() - 1;
                   horizon_ = c.target.horizon();
                   for (std::size_t k = 0; k < c.target.size(); ++k) {
                     const double expected = horizon_ * static_cast<double>(k) / static_cast<double>(trace_steps_);
                     if (std::abs(c.target.times()[k] - expected) > 1e-9 * horizon_)
                       throw InvalidArgument("tube target must be sampled on a uniform capacity grid");
                   }
                 },
                 [&](const Endpoint& c) {
                   if (!(c.tolerance > 0.0)) throw InvalidArgument("endpoint tolerance must be positive");
                 },
                 [&](const AvoidDisk& c) {
                   if (!(c.radius > 0.0)) throw InvalidArgument("disk radius must be positive");
                 },
             },
             constraint_);
  if (!(horizon_ > 0.0)) throw InvalidArgument("horizon must be positive");
  if (trace_steps_ == 0 || trace_steps_ % segments != 0)
    throw InvalidArgument("segment count must divide the trace grid (" + std::to_string(trace_steps_) + " steps)");
}

Driver PenaltyProblem::node_driver(std::span<const double> free) const {
  if (free.size() != segments_) throw InvalidArgument("wrong number of driver values");
  std::vector<double> v(segments_ + 1);
  v[0] = 0.0;
  std::copy(free.begin(), free.end(), v.begin() + 1);
  return Driver::make(std::move(v), horizon_);
}

double PenaltyProblem::energy(std::span<const double> free) const {
  double prev = 0.0, sum = 0.0;
  for (double x : free) {
    sum += (x - prev) * (x - prev);
    prev = x;
  }
  return 0.5 * sum * static_cast<double>(segments_) / horizon_;
}

PenaltyProblem::Excess PenaltyProblem::excess(std::span<const double> free) const {
  // Resample the node driver onto the trace grid.
  const std::size_t stride = trace_steps_ / segments_;
  std::vector<double> fine(trace_steps_ + 1);
  double prev = 0.0;
  for (std::size_t s = 0; s < segments_; ++s) {
    const double next = free[s];
    for (std::size_t r = 0; r < stride; ++r)
      fine[s * stride + r] = prev + (next - prev) * static_cast<double>(r) / static_cast<double>(stride);
    prev = next;
  }
  fine[trace_steps_] = prev;
  const auto chain = MapChain::build(Driver::make(std::move(fine), horizon_));

  Excess out{0.0, 0.0};
  auto add = [&](double e) {
    if (e > 0.0) {
      out.squared_sum += e * e;
      out.max = std::max(out.max, e);
    }
  };
  std::visit(overloaded{
                 [&](const TubeMembership& c) {
                   if (std::isinf(c.radius)) return;
                   for (std::size_t k = 1; k <= trace_steps_; ++k) add(std::abs(chain.tip(k) - c.target[k]) - c.radius);
                 },
                 [&](const Endpoint& c) { add(std::abs(chain.tip(trace_steps_) - c.point) - c.tolerance); },
                 [&](const AvoidDisk& c) {
                   for (std::size_t k = 0; k <= trace_steps_; ++k) add(c.radius - std::abs(chain.tip(k) - c.center));
                 },
             },
             constraint_);
  return out;
}

double PenaltyProblem::violation(std::span<const double> free) const {
  try {
    return excess(free).squared_sum;
  } catch (const SingularityError&) {
    return kInf;
  }
}

double PenaltyProblem::residual(std::span<const double> free) const {
  try {
    return excess(free).max;
  } catch (const SingularityError&) {
    return kInf;
  }
}

double PenaltyProblem::objective(std::span<const double> free, double mu) const {
  const double v = violation(free);
  return energy(free) + (v == 0.0 ? 0.0 : mu * v);
}

std::vector<double> PenaltyProblem::gradient(std::span<const double> free, double mu) const {
  std::vector<double> x(free.begin(), free.end());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + fd_step_;
    const double up = objective(x, mu);
    x[i] = keep - fd_step_;
    const double down = objective(x, mu);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * fd_step_);
  }
  return g;
}

namespace {

struct InnerResult {
  int iterations = 0;
  bool hit_cap = false;
};

// L-BFGS directions with Armijo backtracking on a fixed penalty weight.
InnerResult descend(const PenaltyProblem& problem, std::vector<double>& x, double mu, const Options& options) {
  constexpr std::size_t kMemory = 8;
  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  double f = problem.objective(x, mu);
  auto g = problem.gradient(x, mu);
  InnerResult out;
  const std::size_t n = x.size();
  int stalls = 0;
  while (out.iterations < options.max_inner) {
    if (max_abs(g) < options.grad_tol) return out;
    // two-loop recursion
    std::vector<double> d(g);
    std::vector<double> alpha(s_hist.size());
    for (std::size_t i = s_hist.size(); i-- > 0;) {
      alpha[i] = rho_hist[i] * dot(s_hist[i], d);
      for (std::size_t j = 0; j < n; ++j) d[j] -= alpha[i] * y_hist[i][j];
    }
    if (!s_hist.empty()) {
      const double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
      for (double& v : d) v *= gamma;
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * dot(y_hist[i], d);
      for (std::size_t j = 0; j < n; ++j) d[j] += s_hist[i][j] * (alpha[i] - beta);
    }
    for (double& v : d) v = -v;
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t j = 0; j < n; ++j) d[j] = -g[j];
      slope = dot(g, d);
    }
    if (s_hist.empty()) {
      // first step: cap the move at 0.1 in driver units
      const double scale = std::min(1.0, 0.1 / std::max(max_abs(d), 1e-300));
      for (double& v : d) v *= scale;
      slope *= scale;
    }

    double step = 1.0;
    std::vector<double> trial(n);
    double f_trial = kInf;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      for (std::size_t j = 0; j < n; ++j) trial[j] = x[j] + step * d[j];
      f_trial = problem.objective(trial, mu);
      if (f_trial <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++out.iterations;
    if (!accepted) {
      if (s_hist.empty()) return out;  // no descent even along -g
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      continue;
    }
    auto g_trial = problem.gradient(trial, mu);
    std::vector<double> s(n), y(n);
    for (std::size_t j = 0; j < n; ++j) {
      s[j] = trial[j] - x[j];
      y[j] = g_trial[j] - g[j];
    }
    const double sy = dot(s, y);
    if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > kMemory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    const double decrease = f - f_trial;
    x.swap(trial);
    g.swap(g_trial);
    f = f_trial;
    stalls = decrease <= 1e-13 * std::max(1.0, std::abs(f)) ? stalls + 1 : 0;
    if (stalls >= 3) return out;
  }
  out.hit_cap = true;
  return out;
}

OptResult run_start(const PenaltyProblem& problem, std::vector<double> x, const Options& options) {
  OptResult result{problem.node_driver(x)};
  double mu = options.mu0;
  InnerResult last;
  for (int round = 0; round < options.rounds; ++round) {
    last = descend(problem, x, mu, options);
    result.iterations += last.iterations;
    if (problem.violation(x) == 0.0 && round > 0) break;
    mu *= options.mu_growth;
  }
  result.driver = problem.node_driver(x);
  result.energy = problem.energy(x);
  result.residual = problem.residual(x);
  result.feasible = result.residual <= options.residual_tol;
  result.converged = result.feasible && !last.hit_cap;
  return result;
}

bool better(const OptResult& a, const OptResult& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (!a.feasible) return a.residual < b.residual;
  return a.energy < b.energy;
}

}  // namespace

OptResult minimize_energy(const Constraint& constraint, std::size_t segments, const Options& options) {
  const PenaltyProblem problem(constraint, segments, options);
  std::vector<std::vector<double>> starts;
  starts.emplace_back(segments, 0.0);
  GaussianStream noise(mix_seed(options.seed, 0));
  for (int s = 0; s < options.perturbed_starts; ++s) {
    std::vector<double> x(segments);
    // Brownian-like perturbation: node values of a random walk with the given scale at T
    double level = 0.0;
    for (auto& v : x) {
      level += options.perturbation_scale * noise.normal() / std::sqrt(static_cast<double>(segments));
      v = level;
    }
    starts.push_back(std::move(x));
  }
  for (const auto& extra : options.extra_starts) {
    if (extra.size() != segments + 1 || extra.front() != 0.0)
      throw InvalidArgument("extra starts need m + 1 node values starting at 0");
    starts.emplace_back(extra.begin() + 1, extra.end());
  }

  std::vector<std::optional<OptResult>> results(starts.size());
  parallel_for(starts.size(), options.threads,
               [&](std::size_t i) { results[i] = run_start(problem, starts[i], options); });
  OptResult best = *results.front();
  for (std::size_t i = 1; i < results.size(); ++i)
    if (better(*results[i], best)) best = *results[i];
  return best;
}

std::vector<LimitRow> neighborhood_limit(const Curve& target, const std::vector<double>& radii, std::size_t segments,
                                         const Options& options) {
  if (radii.empty()) throw InvalidArgument("radius list is empty");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] < radii[i - 1])) throw InvalidArgument("radii must be strictly decreasing");
  std::vector<LimitRow> rows;
  Options local = options;
  for (double radius : radii) {
    auto result = minimize_energy(TubeMembership{target, radius}, segments, local);
    const auto v = result.driver.values();
    local.extra_starts = {std::vector<double>(v.begin(), v.end())};
    rows.push_back({radius, std::move(result)});
  }
  return rows;
}

}  // namespace loewner::opt
