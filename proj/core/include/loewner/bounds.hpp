#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loewner/driver.hpp"
#include "loewner/map_chain.hpp"

namespace loewner::bounds {

// Bounds that hold exactly for any conformal map (Koebe, rectangle distortion).
inline constexpr double kExactTolerance = 1e-9;
// Bounds whose continuum statement is checked through the discretized solver.
inline constexpr double kSolverTolerance = 1e-2;

struct Witness {
  double t = 0.0;
  double y = 0.0;
  std::string driver;
};

struct BoundReport {
  std::string bound_id;
  std::size_t points = 0;
  double worst_ratio = 0.0;  // lhs / rhs; <= 1 means the inequality holds
  Witness witness;
  bool pass = true;
  double tolerance = kSolverTolerance;
  // false when the check's own hypothesis failed (dyadic corners); pass is then vacuous
  bool hypothesis_satisfied = true;
  std::optional<double> empirical_constant;  // rectangle lemma: smallest c1 at the fixed c2
  std::string note;

  void record(double ratio, const Witness& where);
  void record_failure(const Witness& where, const std::string& why);
  // Sets pass from worst_ratio and tolerance (and keeps a recorded failure).
  void finalize();
};

// Combines reports of the same bound over many instances: points add up, the
// worst ratio and its witness win, pass is the conjunction.
BoundReport merge(std::span<const BoundReport> reports);

// |f1_t(x+iy) - f2_t(x+iy)| <= ||l1 - l2||_inf sqrt(1 + 4/y^2) for t in t_grid,
// y in y_grid and x = 0 (x in {-1, 0, 1} with wide_x).
BoundReport check_continuity_bound(const Driver& first, const Driver& second, std::span<const double> y_grid,
                                   std::span<const double> t_grid, bool wide_x = false,
                                   const std::string& driver_id = "");

// log|f^'_t(iy)| <= I_D(lambda) / 2, reported as |f^'| / exp(I_D / 2).
BoundReport check_derivative_energy_bound(const Driver& driver, std::span<const double> y_grid,
                                          std::span<const double> t_grid, const std::string& driver_id = "");

// |gamma(t_k) - f^_{t_k}(iy)| <= y exp(c/2) at every grid time; requires I_D <= c.
BoundReport check_tip_distance_bound(const Driver& driver, double energy_bound, double y,
                                     const std::string& driver_id = "");

// (1-r)/(1+r)^3 <= |f'(w)| / |f'(z)| <= (1+r)/(1-r)^3 for |z - w| <= r Im z.
BoundReport check_koebe(const MapChain& chain, double t, Complex z, Complex w, double r,
                        const std::string& driver_id = "");

// Constants of the rectangle distortion lemma at r = 1/2.
struct RectangleConstants {
  double c1 = std::pow(12.0, 10.0);
  double c2 = 2.0 * std::log2(12.0);
};

// Where the unit rectangle S = [-1,1] x [0,1] sits in the map's domain:
// the checked map is g(w) = f_t(center + scale w).
struct RectanglePlacement {
  double center = 0.0;
  double scale = 1.0;
};

// |g'(z2)| <= c1 y^{-c2} |g'(z1)| for z1, z2 in S with Im z1, Im z2 >= y.
// Also records c1_hat = y^{c2} |g'(z2)| / |g'(z1)|.
BoundReport check_rectangle_distortion(const MapChain& chain, double t, Complex z1, Complex z2, double y,
                                       RectanglePlacement placement = {}, RectangleConstants constants = {},
                                       const std::string& driver_id = "");

// Q(x) = c1 (1 + x^2)^c2 with c1 = 12 e^10 c1_rect and c2 = c2_rect / 2.
struct DyadicConstants {
  RectangleConstants rectangle;
  double c1() const { return 12.0 * std::exp(10.0) * rectangle.c1; }
  double c2() const { return rectangle.c2 / 2.0; }
  double q(double x) const { return c1() * std::pow(1.0 + x * x, c2()); }
  // psi(n) = c1 (1 + log n)^c2
  double psi(double n) const { return c1() * std::pow(1.0 + std::log(n), c2()); }
};

// p(t, y) = (1/y) sup_{s in [0, y^2]} |lambda(t + s) - lambda(t)|, clipped at T.
double local_increment_ratio(const Driver& driver, double t, double y);

enum class BoundForm { random_q, deterministic_psi };

struct DerivativeScanOptions {
  double beta = 0.8;
  int level_low = 2;   // coarsest dyadic level n
  int level_high = 6;  // truncation m_max
  double y_top = 0.25; // largest y on the grid (2^-n or 1/sqrt(n))
  BoundForm form = BoundForm::random_q;
  double psi_argument = 2.0;  // n in psi(n)
  bool check_corners = true;
  DyadicConstants constants;
};

struct DerivativeScan {
  bool corner_hypothesis = true;  // |f^'_{j/4^m}(i 2^-m)| <= 2^{beta m} for all scanned corners
  double worst_corner_ratio = 0.0;
  double worst_ratio = 0.0;       // |f^'_t(iy)| / (bound(t, y) y^-beta)
  std::size_t points = 0;
  Witness witness;
};

// Evaluates |f^'_t(iy)| on the dyadic (t, y) grid: for each level m in
// [level_low, level_high], t = j / 4^m and y in {2^-m, 2^-m / sqrt 2} (capped by
// y_top, which is also scanned at the coarsest level). The driver must live on
// [0, 1] with 4^level_high dividing its step count.
DerivativeScan scan_derivative_bound(const Driver& driver, const MapChain& chain,
                                     const DerivativeScanOptions& options);

// Proposition-style implication: when every corner bound holds for m in [n, m_max],
// |f^'_t(iy)| <= Q(p(t, y)) y^-beta on the grid. A failed corner hypothesis is
// reported with hypothesis_satisfied = false and a vacuous pass.
BoundReport check_dyadic_implication(const Driver& driver, double beta, int n, int m_max,
                                     DyadicConstants constants = {}, const std::string& driver_id = "");

}  // namespace loewner::bounds
