#include "loewner/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "loewner/curve.hpp"
#include "loewner/error.hpp"

namespace loewner::bounds {

void BoundReport::record(double ratio, const Witness& where) {
  ++points;
  if (!(ratio <= worst_ratio)) {  // NaN counts as a violation
    worst_ratio = std::isnan(ratio) ? std::numeric_limits<double>::infinity() : ratio;
    witness = where;
  }
}

void BoundReport::record_failure(const Witness& where, const std::string& why) {
  ++points;
  worst_ratio = std::numeric_limits<double>::infinity();
  witness = where;
  note = why;
  pass = false;
}

void BoundReport::finalize() { pass = pass && worst_ratio <= 1.0 + tolerance; }

BoundReport merge(std::span<const BoundReport> reports) {
  if (reports.empty()) throw InvalidArgument("nothing to merge");
  BoundReport out;
  out.bound_id = reports.front().bound_id;
  out.tolerance = reports.front().tolerance;
  bool first = true;
  for (const auto& r : reports) {
    if (r.bound_id != out.bound_id) throw InvalidArgument("merging reports of different bounds");
    out.points += r.points;
    if (first || r.worst_ratio > out.worst_ratio) {
      out.worst_ratio = r.worst_ratio;
      out.witness = r.witness;
    }
    first = false;
    out.pass = out.pass && r.pass;
    out.hypothesis_satisfied = out.hypothesis_satisfied && r.hypothesis_satisfied;
    if (r.empirical_constant)
      out.empirical_constant = std::max(out.empirical_constant.value_or(0.0), *r.empirical_constant);
    if (out.note.empty()) out.note = r.note;
  }
  return out;
}

namespace {

// sup |l1 - l2| over the union of both grids (exact for piecewise-linear drivers).
double driver_gap(const Driver& a, const Driver& b) {
  if (a.steps() == b.steps()) return sup_distance(a, b);
  double m = 0.0;
  for (std::size_t k = 0; k <= a.steps(); ++k) m = std::max(m, std::abs(a[k] - b.at(a.time(k))));
  for (std::size_t k = 0; k <= b.steps(); ++k) m = std::max(m, std::abs(b[k] - a.at(b.time(k))));
  return m;
}

void require_positive(std::span<const double> ys) {
  for (double y : ys)
    if (!(y > 0.0)) throw InvalidArgument("y grid must lie in (0, inf)");
}

}  // namespace

BoundReport check_continuity_bound(const Driver& first, const Driver& second, std::span<const double> y_grid,
                                   std::span<const double> t_grid, bool wide_x, const std::string& driver_id) {
  if (first.horizon() != second.horizon()) throw InvalidArgument("continuity check needs equal horizons");
  require_positive(y_grid);
  BoundReport report;
  report.bound_id = "continuity";
  report.tolerance = kSolverTolerance;
  if (wide_x) report.note = "x in {-1,0,1}";
  const auto chain1 = MapChain::build(first);
  const auto chain2 = MapChain::build(second);
  const double gap = driver_gap(first, second);
  const std::vector<double> xs = wide_x ? std::vector<double>{-1.0, 0.0, 1.0} : std::vector<double>{0.0};
  for (double t : t_grid) {
    const auto k1 = chain1.step_at(t);
    const auto k2 = chain2.step_at(t);
    for (double x : xs) {
      for (double y : y_grid) {
        const Witness where{t, y, driver_id};
        try {
          const Complex z{x, y};
          const double lhs = std::abs(chain1.evaluate(k1, z) - chain2.evaluate(k2, z));
          const double rhs = gap * std::sqrt(1.0 + 4.0 / (y * y));
          report.record(rhs > 0.0 ? lhs / rhs : (lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity()),
                        where);
        } catch (const SingularityError& e) {
          report.record_failure(where, e.what());
        }
      }
    }
  }
  report.finalize();
  return report;
}

BoundReport check_derivative_energy_bound(const Driver& driver, std::span<const double> y_grid,
                                          std::span<const double> t_grid, const std::string& driver_id) {
  require_positive(y_grid);
  BoundReport report;
  report.bound_id = "derivative_energy";
  report.tolerance = kSolverTolerance;
  const auto chain = MapChain::build(driver);
  const double rhs = std::exp(0.5 * dirichlet_energy(driver).value());
  for (double t : t_grid) {
    const auto k = chain.step_at(t);
    for (double y : y_grid) {
      const Witness where{t, y, driver_id};
      try {
        report.record(std::abs(chain.derivative_centered(k, {0.0, y})) / rhs, where);
      } catch (const SingularityError& e) {
        report.record_failure(where, e.what());
      }
    }
  }
  report.finalize();
  return report;
}

BoundReport check_tip_distance_bound(const Driver& driver, double energy_bound, double y,
                                     const std::string& driver_id) {
  if (!(y > 0.0)) throw InvalidArgument("tip distance check needs y > 0");
  const double energy = dirichlet_energy(driver).value();
  if (energy > energy_bound * (1.0 + 1e-12)) throw InvalidArgument("driver energy exceeds the declared bound c");
  BoundReport report;
  report.bound_id = "tip_distance";
  report.tolerance = kSolverTolerance;
  const auto chain = MapChain::build(driver);
  const double rhs = y * std::exp(0.5 * energy_bound);
  for (std::size_t k = 0; k <= chain.steps(); ++k) {
    const Witness where{chain.time(k), y, driver_id};
    try {
      const double lhs = std::abs(chain.tip(k) - chain.evaluate_centered(k, {0.0, y}));
      report.record(lhs / rhs, where);
    } catch (const SingularityError& e) {
      report.record_failure(where, e.what());
    }
  }
  report.finalize();
  return report;
}

BoundReport check_koebe(const MapChain& chain, double t, Complex z, Complex w, double r,
                        const std::string& driver_id) {
  if (!(r >= 0.0 && r < 1.0)) throw InvalidArgument("Koebe radius must lie in [0, 1)");
  if (!(z.imag() > 0.0) || !(w.imag() > 0.0)) throw InvalidArgument("Koebe points must lie in the upper half-plane");
  if (std::abs(z - w) > r * z.imag() * (1.0 + 1e-12)) throw InvalidArgument("Koebe needs |z - w| <= r Im z");
  BoundReport report;
  report.bound_id = "koebe";
  report.tolerance = kExactTolerance;
  const auto k = chain.step_at(t);
  const Witness where{t, z.imag(), driver_id};
  try {
    const double q = std::abs(chain.derivative(k, w)) / std::abs(chain.derivative(k, z));
    const double lower = (1.0 - r) / std::pow(1.0 + r, 3);
    const double upper = (1.0 + r) / std::pow(1.0 - r, 3);
    report.record(std::max(q / upper, lower / q), where);
  } catch (const SingularityError& e) {
    report.record_failure(where, e.what());
  }
  report.finalize();
  return report;
}

BoundReport check_rectangle_distortion(const MapChain& chain, double t, Complex z1, Complex z2, double y,
                                       RectanglePlacement placement, RectangleConstants constants,
                                       const std::string& driver_id) {
  if (!(y > 0.0 && y <= 1.0)) throw InvalidArgument("rectangle check needs y in (0, 1]");
  if (!(placement.scale > 0.0)) throw InvalidArgument("rectangle placement scale must be positive");
  for (const Complex& z : {z1, z2}) {
    if (std::abs(z.real()) > 1.0 || z.imag() > 1.0 || z.imag() < y)
      throw InvalidArgument("rectangle points must lie in [-1,1] x [y,1]");
  }
  BoundReport report;
  report.bound_id = "rectangle_distortion";
  report.tolerance = kExactTolerance;
  report.note = "c1 = 12^10, c2 = 2 log2 12 (r = 1/2)";
  const auto k = chain.step_at(t);
  const Witness where{t, y, driver_id};
  try {
    const auto place = [&](Complex z) { return placement.center + placement.scale * z; };
    const double ratio = std::abs(chain.derivative(k, place(z2))) / std::abs(chain.derivative(k, place(z1)));
    report.record(ratio / (constants.c1 * std::pow(y, -constants.c2)), where);
    report.empirical_constant = ratio * std::pow(y, constants.c2);
  } catch (const SingularityError& e) {
    report.record_failure(where, e.what());
  }
  report.finalize();
  return report;
}

double local_increment_ratio(const Driver& driver, double t, double y) {
  const double end = std::min(driver.horizon(), t + y * y);
  const double base = driver.at(t);
  double sup = std::abs(driver.at(end) - base);
  const double dt = driver.dt();
  auto k = static_cast<std::size_t>(std::floor(t / dt * (1.0 + 1e-14))) + 1;
  for (; k <= driver.steps() && driver.time(k) < end; ++k) sup = std::max(sup, std::abs(driver[k] - base));
  return sup / y;
}

DerivativeScan scan_derivative_bound(const Driver& driver, const MapChain& chain,
                                     const DerivativeScanOptions& options) {
  if (driver.horizon() != 1.0) throw InvalidArgument("dyadic scans need horizon 1");
  if (options.level_low < 0 || options.level_high < options.level_low || options.level_high > 15)
    throw InvalidArgument("dyadic levels must satisfy 0 <= n <= m_max <= 15");
  if (!(options.beta > 0.0 && options.beta < 1.0)) throw InvalidArgument("beta must lie in (0, 1)");
  const std::size_t finest = std::size_t{1} << (2 * options.level_high);
  if (driver.steps() % finest != 0)
    throw InvalidArgument("driver steps must be a multiple of 4^m_max = " + std::to_string(finest));
  const std::size_t stride_unit = driver.steps() / finest;

  DerivativeScan scan;
  const double psi = options.form == BoundForm::deterministic_psi ? options.constants.psi(options.psi_argument) : 0.0;
  auto bound_at = [&](double t, double y) {
    const double factor =
        options.form == BoundForm::random_q ? options.constants.q(local_increment_ratio(driver, t, y)) : psi;
    return factor * std::pow(y, -options.beta);
  };
  auto visit = [&](std::size_t k, double y) {
    const double t = chain.time(k);
    const double d = std::abs(chain.derivative_centered(k, {0.0, y}));
    const double ratio = d / bound_at(t, y);
    ++scan.points;
    if (ratio > scan.worst_ratio || scan.points == 1) {
      scan.worst_ratio = ratio;
      scan.witness = {t, y, {}};
    }
    return d;
  };

  for (int m = options.level_low; m <= options.level_high; ++m) {
    const std::size_t cells = std::size_t{1} << (2 * m);
    const std::size_t stride = stride_unit * (finest / cells);
    const double corner_y = std::ldexp(1.0, -m);
    const double corner_bound = std::pow(2.0, options.beta * m);
    std::vector<double> ys;
    if (corner_y <= options.y_top) ys.push_back(corner_y);
    if (corner_y / std::sqrt(2.0) <= options.y_top) ys.push_back(corner_y / std::sqrt(2.0));
    if (m == options.level_low && options.y_top < 1.0 && options.y_top != corner_y) ys.push_back(options.y_top);
    for (std::size_t j = 0; j <= cells; ++j) {
      const std::size_t k = j * stride;
      for (double y : ys) {
        const double d = visit(k, y);
        if (options.check_corners && j >= 1 && y == corner_y) {
          const double cr = d / corner_bound;
          scan.worst_corner_ratio = std::max(scan.worst_corner_ratio, cr);
          if (cr > 1.0) scan.corner_hypothesis = false;
        }
      }
    }
  }
  return scan;
}

BoundReport check_dyadic_implication(const Driver& driver, double beta, int n, int m_max, DyadicConstants constants,
                                     const std::string& driver_id) {
  BoundReport report;
  report.bound_id = "dyadic_implication";
  report.tolerance = kSolverTolerance;
  report.note = "truncated at m_max=" + std::to_string(m_max) + "; c1=12e^10*12^10, c2=log2(12)";
  const auto chain = MapChain::build(driver);
  DerivativeScanOptions options;
  options.beta = beta;
  options.level_low = n;
  options.level_high = m_max;
  options.y_top = std::ldexp(1.0, -n);
  options.form = BoundForm::random_q;
  options.constants = constants;
  try {
    const auto scan = scan_derivative_bound(driver, chain, options);
    report.points = scan.points;
    report.hypothesis_satisfied = scan.corner_hypothesis;
    if (!scan.corner_hypothesis) {
      report.note += "; hypothesis not satisfied";
      report.worst_ratio = 0.0;
    } else {
      report.worst_ratio = scan.worst_ratio;
      report.witness = {scan.witness.t, scan.witness.y, driver_id};
    }
  } catch (const SingularityError& e) {
    report.record_failure({0.0, 0.0, driver_id}, e.what());
  }
  report.finalize();
  return report;
}

}  // namespace loewner::bounds
