#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "loewner/curve.hpp"
#include "loewner/driver.hpp"

namespace loewner::opt {

// Trace stays within `radius` of target at every grid time (radius = +inf: no constraint).
struct TubeMembership {
  Curve target;
  double radius = 0.1;
};

// |gamma(T) - point| <= tolerance
struct Endpoint {
  Complex point;
  double tolerance = 0.05;
};

// |gamma(t_k) - center| >= radius at every grid time
struct AvoidDisk {
  Complex center;
  double radius = 1.0;
};

using Constraint = std::variant<TubeMembership, Endpoint, AvoidDisk>;

std::string describe(const Constraint& constraint);

struct Options {
  double horizon = 1.0;           // Endpoint / AvoidDisk; tubes use the target's horizon
  std::size_t trace_steps = 128;  // Endpoint / AvoidDisk; tubes use the target's grid
  double fd_step = 1e-4;          // central differences in driver values
  double mu0 = 10.0;
  double mu_growth = 10.0;
  int rounds = 6;
  int max_inner = 300;
  double grad_tol = 1e-8;
  double residual_tol = 1e-3;
  int perturbed_starts = 4;
  double perturbation_scale = 0.3;
  std::uint64_t seed = 7;
  unsigned threads = 1;
  // Additional starting node vectors (m + 1 values, first one 0).
  std::vector<std::vector<double>> extra_starts;
};

struct OptResult {
  Driver driver;  // m-segment minimizer
  double energy = 0.0;
  double residual = 0.0;  // 0 when the constraint holds
  int iterations = 0;
  bool converged = false;
  bool feasible = false;
};

// Penalized objective I_D(x) + mu V(x) over node values x_1..x_m (x_0 = 0), where
// V sums squared constraint excesses along the traced curve. Exposed for tests.
class PenaltyProblem {
 public:
  PenaltyProblem(Constraint constraint, std::size_t segments, const Options& options);

  std::size_t dimension() const noexcept { return segments_; }
  double horizon() const noexcept { return horizon_; }

  Driver node_driver(std::span<const double> free) const;
  double energy(std::span<const double> free) const;
  // V(x); +inf when the trace hits a singularity.
  double violation(std::span<const double> free) const;
  // Largest constraint excess (0 when satisfied).
  double residual(std::span<const double> free) const;
  double objective(std::span<const double> free, double mu) const;
  // Central finite differences of objective with step options.fd_step.
  std::vector<double> gradient(std::span<const double> free, double mu) const;

 private:
  struct Excess {
    double squared_sum;
    double max;
  };
  Excess excess(std::span<const double> free) const;

  Constraint constraint_;
  std::size_t segments_;
  std::size_t trace_steps_;
  double horizon_;
  double fd_step_;
};

// Penalty method: mu escalates by mu_growth per round, inner L-BFGS with backtracking;
// multi-start from the zero driver, perturbed_starts seeded Gaussian starts and
// extra_starts; the best feasible (then lowest-energy) result wins.
OptResult minimize_energy(const Constraint& constraint, std::size_t segments, const Options& options);

struct LimitRow {
  double radius;
  OptResult result;
};

// Minimizes over shrinking tubes around target (radii strictly decreasing),
// warm-starting each radius from the previous minimizer.
std::vector<LimitRow> neighborhood_limit(const Curve& target, const std::vector<double>& radii, std::size_t segments,
                                         const Options& options);

}  // namespace loewner::opt
