#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace loewner {

// Extended nonnegative real; +inf marks drivers that are not absolutely continuous.
class EnergyValue {
 public:
  constexpr EnergyValue() = default;
  explicit EnergyValue(double v);

  static constexpr EnergyValue infinite() {
    EnergyValue e;
    e.value_ = std::numeric_limits<double>::infinity();
    return e;
  }

  constexpr double value() const noexcept { return value_; }
  constexpr bool finite() const noexcept { return value_ < std::numeric_limits<double>::infinity(); }

  friend constexpr auto operator<=>(EnergyValue a, EnergyValue b) noexcept {
    return a.value_ <=> b.value_;
  }
  friend constexpr bool operator==(EnergyValue a, EnergyValue b) noexcept = default;

 private:
  double value_ = 0.0;
};

// Real driving function sampled at t_k = k T / n, k = 0..n, interpolated linearly.
// Invariants: n >= 1, lambda_0 == 0, all samples finite.
class Driver {
 public:
  // Rejects empty input, a nonzero first value, non-finite values and T <= 0.
  // A single sample [0] yields the one-step constant-zero driver.
  static Driver make(std::vector<double> values, double horizon);

  double horizon() const noexcept { return horizon_; }
  std::size_t steps() const noexcept { return values_.size() - 1; }
  double dt() const noexcept { return horizon_ / static_cast<double>(steps()); }
  double time(std::size_t k) const noexcept {
    if (k == steps()) return horizon_;
    return horizon_ * static_cast<double>(k) / static_cast<double>(steps());
  }

  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }

  // Piecewise-linear value at t in [0, T] (clamped outside).
  double at(double t) const noexcept;

  // max_k |lambda_k|
  double sup_norm() const noexcept;

  friend bool operator==(const Driver&, const Driver&) = default;

 private:
  Driver(std::vector<double> values, double horizon)
      : values_(std::move(values)), horizon_(horizon) {}

  std::vector<double> values_;
  double horizon_ = 1.0;
};

inline Driver make_driver(std::vector<double> values, double horizon) {
  return Driver::make(std::move(values), horizon);
}

// lambda_k = sqrt(kappa) B(t_k) with B built from i.i.d. N(0, T/n) increments of
// a GaussianStream(seed). The same (seed, n, T) gives the same B for every kappa.
Driver sample_brownian_driver(double kappa, double horizon, std::size_t steps, std::uint64_t seed);

// Piecewise-linear interpolant through the samples at the `nodes` + 1 node times,
// resampled on the original grid. Requires nodes | steps.
Driver pwl_approximation(const Driver& driver, std::size_t nodes);

// Exact energy of the piecewise-linear driver: 1/2 sum (dlambda_k)^2 / dt.
EnergyValue dirichlet_energy(const Driver& driver);

// sup{|lambda(t) - lambda(s)| : grid points with |t - s| <= delta}, 0 < delta <= T.
double oscillation(const Driver& driver, double delta);

// max over grid points of |a - b|. Requires equal grids.
double sup_distance(const Driver& a, const Driver& b);

// max_k |reference_k - other(t_k)| over the reference grid; other is interpolated
// and held constant past its horizon. For drivers on different grids.
double sup_distance_on_grid(const Driver& reference, const Driver& other);

// Driver with samples a_k - b_k (same grid). Used for energy gaps.
Driver difference(const Driver& a, const Driver& b);

// c * lambda on the same grid.
Driver scaled(const Driver& driver, double c);

struct MollifyResult {
  Driver smoothed;
  double bandwidth;   // kernel width in time units; +inf for the endpoint interpolant
  double energy_gap;  // I(lambda - phi)
  double sup_gap;     // ||lambda - phi||_inf
};

// Smooth driver phi with phi(0) = 0, I(lambda - phi) < eps^2/2 and, as a
// consequence, ||lambda - phi||_inf <= eps sqrt(T). Throws MollifyError when the
// finest bandwidth still misses the energy gap.
MollifyResult mollify_with_report(const Driver& driver, double eps);

inline Driver mollify(const Driver& driver, double eps) {
  return mollify_with_report(driver, eps).smoothed;
}

}  // namespace loewner
