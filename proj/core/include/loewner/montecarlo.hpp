#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "loewner/bounds.hpp"
#include "loewner/curve.hpp"
#include "loewner/driver.hpp"

namespace loewner::mc {

// Open sup-norm tube {gamma : max_k |gamma(t_k) - target(t_k)| < radius}, or its
// complement. The target must be sampled on the run's grid.
struct TubeEvent {
  Curve target;
  double radius = 0.1;
  bool complement = false;
};

// {max_k |lambda_k| >= level}
struct DriverSupEvent {
  double level = 1.0;
};

enum class DerivativeScale { dyadic, sqrt };

// Complement of the derivative event: |f^'_t(iy)| exceeds the bound somewhere on
// the scanned (t, y) grid with y <= 2^-n (dyadic) or y <= 1/sqrt(n) (sqrt).
// random_q uses Q(p(t, y)); deterministic_psi uses psi(n).
struct DerivativeEvent {
  double beta = 0.8;
  int n = 2;
  DerivativeScale scale = DerivativeScale::dyadic;
  bounds::BoundForm form = bounds::BoundForm::random_q;
  int m_max = 4;
};

// {osc(lambda, delta, [0, T]) >= threshold}
struct OscillationEvent {
  double delta = 0.1;
  double threshold = 1.0;
};

using Event = std::variant<TubeEvent, DriverSupEvent, DerivativeEvent, OscillationEvent>;

std::string describe(const Event& event);
void validate(const Event& event);

struct RunOptions {
  std::size_t replicas = 1000;
  std::size_t steps = 2048;  // driver grid on [0, 1]
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct McResult {
  std::string event;
  double kappa = 0.0;
  std::size_t replicas = 0;
  std::size_t hits = 0;
  std::size_t indeterminate = 0;
  double p_hat = 0.0;
  double se = 0.0;
  double kappa_log_p = 0.0;  // -inf when hits == 0
  std::uint64_t seed = 0;
};

// Replicas whose solver hit a singularity are reported as indeterminate; the run
// throws std::runtime_error when they reach 0.1% of the replicas.
McResult make_result(std::string event, double kappa, std::size_t replicas, std::size_t hits,
                     std::size_t indeterminate, std::uint64_t seed);

// Replica i uses the Brownian driver sample_brownian_driver(kappa, 1, steps, mix_seed(seed, i)).
McResult estimate_event(const Event& event, double kappa, const RunOptions& options);

struct MomentResult {
  double kappa = 0.0;
  double y = 0.0;
  double t = 1.0;
  std::size_t replicas = 0;
  double mean = 0.0;
  double se = 0.0;
};

// Sample mean of |f^'_t(iy)|^{2/kappa}; the moment bound says the mean is <= 1.
MomentResult derivative_moment(double kappa, double y, double t, const RunOptions& options);

struct SlopeRow {
  McResult result;
  bool low_hits = false;  // fewer than 50 hits
};

// One estimate per kappa (strictly decreasing list), sharing the seed.
std::vector<SlopeRow> ldp_slope(const Event& event, const std::vector<double>& kappas, const RunOptions& options);

struct ChiSquareStats {
  double mean = 0.0;
  double variance = 0.0;
  std::vector<double> samples;  // (2/kappa) I_D of each replica
};

// (2/kappa) I_D(pwl_approximation(sqrt(kappa) B, m)) over `replicas` runs; the
// fine grid has `fine_factor * m` steps.
ChiSquareStats chi_square_energy(double kappa, std::size_t nodes, std::size_t replicas, std::uint64_t seed,
                                 unsigned threads = 1, std::size_t fine_factor = 4);

struct OscillationTail {
  McResult result;
  double level = 0.0;  // r sqrt(delta log(1/delta))
  double bound = 0.0;  // c0 delta^{(r/c0)^2 / kappa}
  double c0 = 8.0;
  bool pass = false;   // p_hat - 3 se <= bound
};

OscillationTail oscillation_tail(double kappa, double delta, double r, const RunOptions& options, double c0 = 8.0);

// 4^n / (1 - 4^{-(beta/kappa - 1)}) 4^{-beta n / kappa}; +inf when kappa >= beta.
double complement_bound(double beta, double kappa, int n);
// complement_bound + 2 exp(-log(n) / kappa)
double complement_bound_psi(double beta, double kappa, int n);

struct ComplementCheck {
  McResult violation;       // E_n complement on the scanned grid
  McResult corner_failure;  // some corner |f^'_{j/4^m}(i 2^-m)| > 2^{beta m}
  double bound = 0.0;
  double bound_psi = 0.0;
  int m_max = 0;
  bool pass = false;  // both frequencies minus 3 se stay below the bound
};

// Requires kappa <= beta; the driver grid must hold 4^m_max | steps.
ComplementCheck complement_bound_check(double beta, double kappa, int n, const RunOptions& options, int m_max);

struct ConvergenceRow {
  std::size_t nodes = 0;
  double median_sup_error = 0.0;
  double violation_freq = 0.0;  // P[sup error >= n^-zeta]
  double se = 0.0;
  double bound = 0.0;           // B(n, kappa) (n/2)^{-beta/kappa}; +inf outside kappa < beta
  bool in_regime = false;
  std::size_t indeterminate = 0;
};

// B(n, kappa) (n/2)^{-beta/kappa} with B = 2 + c0 + n / (1 - 4^{-(beta/kappa - 1)}).
double convergence_bound(std::size_t nodes, double kappa, double beta, double c0);
// Largest admissible zeta: (1 - sqrt((1 + beta) / 2)) / 2.
double max_zeta(double beta);

// Traces sqrt(kappa) B on options.steps and its piecewise-linear approximations
// with each node count (which must divide options.steps); rejects zeta outside
// (0, max_zeta(beta)).
std::vector<ConvergenceRow> pwl_convergence(double kappa, const std::vector<std::size_t>& node_counts, double beta,
                                            double zeta, const RunOptions& options, double c0 = 8.0);

}  // namespace loewner::mc
