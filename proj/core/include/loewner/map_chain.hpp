#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "loewner/driver.hpp"

namespace loewner {

using Complex = std::complex<double>;

// Square root with nonnegative imaginary part, i.e. the branch with its cut
// along [0, +inf). Maps C \ [0, inf) onto the open upper half-plane.
inline Complex sqrt_upper(Complex z) noexcept {
  const double a = z.real();
  const double b = z.imag();
  const double r = std::sqrt(a * a + b * b);
  if (a >= 0.0) {
    const double t = std::sqrt(0.5 * (r + a));
    if (t == 0.0) return {0.0, 0.0};
    return {std::copysign(t, b), std::abs(b) / (2.0 * t)};
  }
  const double t = std::sqrt(0.5 * (r - a));
  return {b / (2.0 * t), t};
}

// Vertical-slit map pair for one capacity step of length dt at level u.
// forward:  z -> u + sqrt((z - u)^2 + 4 dt)   (removes the slit [u, u + 2i sqrt(dt)])
// inverse:  w -> u + sqrt((w - u)^2 - 4 dt)   (grows it; hcap increases by 2 dt)
inline Complex slit_forward(Complex z, double u, double dt) noexcept {
  const double x = z.real() - u, y = z.imag();
  const Complex s = sqrt_upper({x * x - y * y + 4.0 * dt, 2.0 * x * y});
  return {u + s.real(), s.imag()};
}

inline Complex slit_inverse(Complex w, double u, double dt) noexcept {
  const double x = w.real() - u, y = w.imag();
  const Complex s = sqrt_upper({x * x - y * y - 4.0 * dt, 2.0 * x * y});
  return {u + s.real(), s.imag()};
}

struct MapValue {
  Complex value;
  Complex derivative;
};

// f_t = g_t^{-1} for the piecewise-constant driver that takes the midpoint level
// u_k = (lambda_{k-1} + lambda_k) / 2 on step k. f_{t_k} is the composition
// e_1 o e_2 o ... o e_k of inverse slit maps, e_k applied first.
class MapChain {
 public:
  static MapChain build(const Driver& driver);

  std::size_t steps() const noexcept { return levels_.size(); }
  double dt() const noexcept { return dt_; }
  double horizon() const noexcept { return horizon_; }
  double time(std::size_t k) const noexcept {
    if (k == steps()) return horizon_;
    return horizon_ * static_cast<double>(k) / static_cast<double>(steps());
  }
  // Grid index of t; throws InvalidArgument when t is not a grid time.
  std::size_t step_at(double t) const;

  // u_1..u_n, stored at index k - 1.
  std::span<const double> levels() const noexcept { return levels_; }

  // Preimage of the tip at t_k: u_k for k >= 1 and 0 at k = 0.
  double tip_level(std::size_t k) const noexcept { return k == 0 ? 0.0 : levels_[k - 1]; }

  // f_{t_k}(z) for Im z > 0. Throws InvalidArgument for Im z <= 0 and
  // SingularityError when an intermediate point leaves the upper half-plane.
  Complex evaluate(std::size_t k, Complex z) const;
  Complex derivative(std::size_t k, Complex z) const;
  MapValue evaluate_with_derivative(std::size_t k, Complex z) const;

  // Centered map f^_{t_k}(z) = f_{t_k}(tip_level(k) + z).
  Complex evaluate_centered(std::size_t k, Complex z) const {
    return evaluate(k, tip_level(k) + z);
  }
  Complex derivative_centered(std::size_t k, Complex z) const {
    return derivative(k, tip_level(k) + z);
  }

  // gamma(t_k) = f_{t_{k-1}}(u_k + 2i sqrt(dt)), gamma(0) = 0.
  Complex tip(std::size_t k) const;

 private:
  MapChain(std::vector<double> levels, double dt, double horizon)
      : levels_(std::move(levels)), dt_(dt), horizon_(horizon) {}

  void check_step(std::size_t k) const;

  std::vector<double> levels_;
  double dt_;
  double horizon_;
};

inline MapChain build_chain(const Driver& driver) { return MapChain::build(driver); }

}  // namespace loewner
