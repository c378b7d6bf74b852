#include "loewner/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "loewner/csv_io.hpp"
#include "loewner/error.hpp"
#include "loewner/map_chain.hpp"
#include "loewner/parallel.hpp"
#include "loewner/rng.hpp"
#include "loewner/stats.hpp"

namespace loewner::mc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

enum class Outcome : unsigned char { miss, hit, indeterminate };

bounds::DerivativeScanOptions scan_options(const DerivativeEvent& e) {
  bounds::DerivativeScanOptions o;
  o.beta = e.beta;
  o.form = e.form;
  o.level_high = e.m_max;
  o.psi_argument = e.n;
  o.check_corners = false;
  if (e.scale == DerivativeScale::dyadic) {
    o.level_low = e.n;
    o.y_top = std::ldexp(1.0, -e.n);
  } else {
    o.y_top = 1.0 / std::sqrt(static_cast<double>(e.n));
    o.level_low = static_cast<int>(std::ceil(0.5 * std::log2(static_cast<double>(e.n)) - 1e-12));
  }
  return o;
}

bool inside_tube(const MapChain& chain, const TubeEvent& e) {
  for (std::size_t k = 0; k <= chain.steps(); ++k) {
    if (!(std::abs(chain.tip(k) - e.target[k]) < e.radius)) return false;
  }
  return true;
}

Outcome evaluate(const Event& event, const Driver& driver) {
  try {
    return std::visit(
        overloaded{
            [&](const TubeEvent& e) {
              const bool inside = inside_tube(MapChain::build(driver), e);
              return inside != e.complement ? Outcome::hit : Outcome::miss;
            },
            [&](const DriverSupEvent& e) { return driver.sup_norm() >= e.level ? Outcome::hit : Outcome::miss; },
            [&](const DerivativeEvent& e) {
              const auto scan = bounds::scan_derivative_bound(driver, MapChain::build(driver), scan_options(e));
              return scan.worst_ratio > 1.0 ? Outcome::hit : Outcome::miss;
            },
            [&](const OscillationEvent& e) {
              return oscillation(driver, e.delta) >= e.threshold ? Outcome::hit : Outcome::miss;
            },
        },
        event);
  } catch (const SingularityError&) {
    return Outcome::indeterminate;
  }
}

void check_grid(const Event& event, std::size_t steps) {
  if (const auto* tube = std::get_if<TubeEvent>(&event)) {
    if (tube->target.size() != steps + 1 || tube->target.horizon() != 1.0)
      throw InvalidArgument("tube target must be sampled on the run grid (" + std::to_string(steps) +
                            " steps on [0, 1])");
  }
  if (const auto* d = std::get_if<DerivativeEvent>(&event)) {
    const std::size_t finest = std::size_t{1} << (2 * d->m_max);
    if (steps % finest != 0) throw InvalidArgument("derivative events need 4^m_max to divide the step count");
  }
}

}  // namespace

std::string describe(const Event& event) {
  std::ostringstream s;
  std::visit(overloaded{
                 [&](const TubeEvent& e) {
                   s << (e.complement ? "tube_complement" : "tube") << "(r=" << format_double(e.radius) << ")";
                 },
                 [&](const DriverSupEvent& e) { s << "driver_sup(a=" << format_double(e.level) << ")"; },
                 [&](const DerivativeEvent& e) {
                   s << "derivative(beta=" << format_double(e.beta) << ";n=" << e.n
                     << ";scale=" << (e.scale == DerivativeScale::dyadic ? "dyadic" : "sqrt")
                     << ";form=" << (e.form == bounds::BoundForm::random_q ? "q" : "psi") << ";m_max=" << e.m_max
                     << ")";
                 },
                 [&](const OscillationEvent& e) {
                   s << "oscillation(delta=" << format_double(e.delta) << ";r=" << format_double(e.threshold) << ")";
                 },
             },
             event);
  return s.str();
}

void validate(const Event& event) {
  std::visit(overloaded{
                 [](const TubeEvent& e) {
                   if (!(e.radius > 0.0)) throw InvalidArgument("tube radius must be positive");
                 },
                 [](const DriverSupEvent& e) {
                   if (!(e.level > 0.0)) throw InvalidArgument("driver sup level must be positive");
                 },
                 [](const DerivativeEvent& e) {
                   if (!(e.beta > 0.0 && e.beta < 1.0)) throw InvalidArgument("beta must lie in (0, 1)");
                   if (e.n < 1 || e.m_max < 1 || e.m_max > 8) throw InvalidArgument("need n >= 1 and 1 <= m_max <= 8");
                   if (e.scale == DerivativeScale::dyadic && e.m_max < e.n)
                     throw InvalidArgument("m_max must be at least n");
                 },
                 [](const OscillationEvent& e) {
                   if (!(e.delta > 0.0 && e.delta <= 1.0)) throw InvalidArgument("oscillation delta must lie in (0, 1]");
                   if (!(e.threshold > 0.0)) throw InvalidArgument("oscillation threshold must be positive");
                 },
             },
             event);
}

McResult make_result(std::string event, double kappa, std::size_t replicas, std::size_t hits,
                     std::size_t indeterminate, std::uint64_t seed) {
  if (static_cast<double>(indeterminate) >= 1e-3 * static_cast<double>(replicas) && indeterminate > 0)
    throw std::runtime_error("singularity budget exceeded: " + std::to_string(indeterminate) + " of " +
                             std::to_string(replicas) + " replicas indeterminate");
  McResult r;
  r.event = std::move(event);
  r.kappa = kappa;
  r.replicas = replicas;
  r.hits = hits;
  r.indeterminate = indeterminate;
  r.seed = seed;
  const double effective = static_cast<double>(replicas - indeterminate);
  r.p_hat = effective > 0.0 ? static_cast<double>(hits) / effective : 0.0;
  r.se = effective > 0.0 ? std::sqrt(r.p_hat * (1.0 - r.p_hat) / effective) : 0.0;
  r.kappa_log_p = hits == 0 ? -std::numeric_limits<double>::infinity() : kappa * std::log(r.p_hat);
  return r;
}

McResult estimate_event(const Event& event, double kappa, const RunOptions& options) {
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  if (options.replicas == 0) throw InvalidArgument("need at least one replica");
  validate(event);
  check_grid(event, options.steps);
  std::vector<Outcome> outcomes(options.replicas);
  parallel_for(options.replicas, options.threads, [&](std::size_t i) {
    const auto driver = sample_brownian_driver(kappa, 1.0, options.steps, mix_seed(options.seed, i));
    outcomes[i] = evaluate(event, driver);
  });
  const auto hits = static_cast<std::size_t>(std::count(outcomes.begin(), outcomes.end(), Outcome::hit));
  const auto bad = static_cast<std::size_t>(std::count(outcomes.begin(), outcomes.end(), Outcome::indeterminate));
  return make_result(describe(event), kappa, options.replicas, hits, bad, options.seed);
}

MomentResult derivative_moment(double kappa, double y, double t, const RunOptions& options) {
  if (!(kappa > 0.0) || !(y > 0.0)) throw InvalidArgument("moment estimate needs kappa > 0 and y > 0");
  if (!(t > 0.0 && t <= 1.0)) throw InvalidArgument("moment time must lie in (0, 1]");
  if (options.replicas < 2) throw InvalidArgument("moment estimate needs two replicas");
  std::vector<double> values(options.replicas);
  std::vector<unsigned char> bad(options.replicas, 0);
  const double power = 2.0 / kappa;
  parallel_for(options.replicas, options.threads, [&](std::size_t i) {
    const auto driver = sample_brownian_driver(kappa, 1.0, options.steps, mix_seed(options.seed, i));
    const auto chain = MapChain::build(driver);
    try {
      values[i] = std::pow(std::abs(chain.derivative_centered(chain.step_at(t), {0.0, y})), power);
    } catch (const SingularityError&) {
      bad[i] = 1;
    }
  });
  std::vector<double> kept;
  kept.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!bad[i]) kept.push_back(values[i]);
  make_result("moment", kappa, options.replicas, 0, options.replicas - kept.size(), options.seed);
  MomentResult out{kappa, y, t, kept.size(), stats::mean(kept), 0.0};
  out.se = std::sqrt(stats::variance(kept) / static_cast<double>(kept.size()));
  return out;
}

std::vector<SlopeRow> ldp_slope(const Event& event, const std::vector<double>& kappas, const RunOptions& options) {
  if (kappas.empty()) throw InvalidArgument("kappa list is empty");
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    if (!(kappas[i] > 0.0)) throw InvalidArgument("kappa values must be positive");
    if (i > 0 && !(kappas[i] < kappas[i - 1])) throw InvalidArgument("kappa list must be strictly decreasing");
  }
  std::vector<SlopeRow> rows;
  for (double kappa : kappas) {
    SlopeRow row{estimate_event(event, kappa, options), false};
    row.low_hits = row.result.hits < 50;
    rows.push_back(std::move(row));
  }
  return rows;
}

ChiSquareStats chi_square_energy(double kappa, std::size_t nodes, std::size_t replicas, std::uint64_t seed,
                                 unsigned threads, std::size_t fine_factor) {
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  if (nodes == 0 || fine_factor == 0) throw InvalidArgument("need at least one node");
  if (replicas < 2) throw InvalidArgument("need at least two replicas");
  ChiSquareStats out;
  out.samples.resize(replicas);
  parallel_for(replicas, threads, [&](std::size_t i) {
    const auto driver = sample_brownian_driver(kappa, 1.0, nodes * fine_factor, mix_seed(seed, i));
    out.samples[i] = 2.0 / kappa * dirichlet_energy(pwl_approximation(driver, nodes)).value();
  });
  out.mean = stats::mean(out.samples);
  out.variance = stats::variance(out.samples);
  return out;
}

OscillationTail oscillation_tail(double kappa, double delta, double r, const RunOptions& options, double c0) {
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidArgument("oscillation delta must lie in (0, 1]");
  if (!(c0 > 0.0)) throw InvalidArgument("c0 must be positive");
  if (!(r > c0)) throw InvalidArgument("oscillation tail needs r > c0");
  OscillationTail out;
  out.c0 = c0;
  out.level = r * std::sqrt(delta * std::log(1.0 / delta));
  out.bound = c0 * std::pow(delta, (r / c0) * (r / c0) / kappa);
  // delta = 1 makes the level 0: every path "hits"
  out.result = estimate_event(OscillationEvent{delta, std::max(out.level, std::numeric_limits<double>::min())}, kappa,
                              options);
  out.pass = out.result.p_hat - 3.0 * out.result.se <= out.bound;
  return out;
}

double complement_bound(double beta, double kappa, int n) {
  if (!(kappa > 0.0) || !(beta > 0.0 && beta < 1.0)) throw InvalidArgument("need kappa > 0 and beta in (0, 1)");
  if (kappa >= beta) return std::numeric_limits<double>::infinity();
  const double excess = beta / kappa - 1.0;
  return std::pow(4.0, n) / (1.0 - std::pow(4.0, -excess)) * std::pow(4.0, -beta * n / kappa);
}

double complement_bound_psi(double beta, double kappa, int n) {
  return complement_bound(beta, kappa, n) + 2.0 * std::exp(-std::log(static_cast<double>(n)) / kappa);
}

ComplementCheck complement_bound_check(double beta, double kappa, int n, const RunOptions& options, int m_max) {
  if (kappa > beta) throw InvalidArgument("complement bound needs kappa < beta");
  DerivativeEvent event{beta, n, DerivativeScale::dyadic, bounds::BoundForm::random_q, m_max};
  validate(event);
  check_grid(event, options.steps);
  ComplementCheck out;
  out.m_max = m_max;
  out.bound = complement_bound(beta, kappa, n);
  out.bound_psi = complement_bound_psi(beta, kappa, n);

  auto scan = scan_options(event);
  scan.check_corners = true;
  std::vector<Outcome> violation(options.replicas), corner(options.replicas);
  parallel_for(options.replicas, options.threads, [&](std::size_t i) {
    const auto driver = sample_brownian_driver(kappa, 1.0, options.steps, mix_seed(options.seed, i));
    try {
      const auto s = bounds::scan_derivative_bound(driver, MapChain::build(driver), scan);
      violation[i] = s.worst_ratio > 1.0 ? Outcome::hit : Outcome::miss;
      corner[i] = s.corner_hypothesis ? Outcome::miss : Outcome::hit;
    } catch (const SingularityError&) {
      violation[i] = corner[i] = Outcome::indeterminate;
    }
  });
  auto tally = [&](const std::vector<Outcome>& o, std::string name) {
    const auto hits = static_cast<std::size_t>(std::count(o.begin(), o.end(), Outcome::hit));
    const auto bad = static_cast<std::size_t>(std::count(o.begin(), o.end(), Outcome::indeterminate));
    return make_result(std::move(name), kappa, options.replicas, hits, bad, options.seed);
  };
  out.violation = tally(violation, describe(event));
  out.corner_failure = tally(corner, "corner_failure(beta=" + format_double(beta) + ";n=" + std::to_string(n) +
                                         ";m_max=" + std::to_string(m_max) + ")");
  out.pass = out.violation.p_hat - 3.0 * out.violation.se <= out.bound &&
             out.corner_failure.p_hat - 3.0 * out.corner_failure.se <= out.bound;
  return out;
}

double convergence_bound(std::size_t nodes, double kappa, double beta, double c0) {
  if (kappa >= beta) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(nodes);
  const double b = 2.0 + c0 + n / (1.0 - std::pow(4.0, -(beta / kappa - 1.0)));
  return b * std::pow(n / 2.0, -beta / kappa);
}

double max_zeta(double beta) { return 0.5 * (1.0 - std::sqrt(0.5 * (1.0 + beta))); }

std::vector<ConvergenceRow> pwl_convergence(double kappa, const std::vector<std::size_t>& node_counts, double beta,
                                            double zeta, const RunOptions& options, double c0) {
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in (0, 1)");
  if (!(zeta > 0.0 && zeta < max_zeta(beta)))
    throw InvalidArgument("zeta must lie in (0, " + format_double(max_zeta(beta)) + ")");
  if (node_counts.empty()) throw InvalidArgument("node list is empty");
  for (auto n : node_counts)
    if (n == 0 || options.steps % n != 0) throw InvalidArgument("node counts must divide the fine step count");

  const std::size_t cols = node_counts.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> errors(options.replicas * cols, nan);
  parallel_for(options.replicas, options.threads, [&](std::size_t i) {
    const auto driver = sample_brownian_driver(kappa, 1.0, options.steps, mix_seed(options.seed, i));
    std::optional<Curve> fine;
    try {
      fine = trace(driver);
    } catch (const SingularityError&) {
      return;
    }
    for (std::size_t j = 0; j < cols; ++j) {
      try {
        errors[i * cols + j] = sup_distance(*fine, trace(pwl_approximation(driver, node_counts[j])));
      } catch (const SingularityError&) {
      }
    }
  });

  std::vector<ConvergenceRow> rows;
  for (std::size_t j = 0; j < cols; ++j) {
    ConvergenceRow row;
    row.nodes = node_counts[j];
    std::vector<double> kept;
    for (std::size_t i = 0; i < options.replicas; ++i) {
      const double e = errors[i * cols + j];
      if (std::isnan(e))
        ++row.indeterminate;
      else
        kept.push_back(e);
    }
    if (kept.empty()) throw std::runtime_error("every replica hit a singularity");
    const double level = std::pow(static_cast<double>(row.nodes), -zeta);
    const auto viol = std::count_if(kept.begin(), kept.end(), [&](double e) { return e >= level; });
    row.median_sup_error = stats::median(kept);
    row.violation_freq = static_cast<double>(viol) / static_cast<double>(kept.size());
    row.se = std::sqrt(row.violation_freq * (1.0 - row.violation_freq) / static_cast<double>(kept.size()));
    row.in_regime = kappa < beta;
    row.bound = convergence_bound(row.nodes, kappa, beta, c0);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace loewner::mc
