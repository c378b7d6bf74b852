#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "loewner/curve.hpp"
#include "loewner/driver.hpp"

namespace loewner {

struct ZipResult {
  // Recovered driver on a uniform grid over [0, horizon] with one step per
  // consumed point; empty for a single-point curve.
  std::optional<Driver> driver;
  // Level x_k and capacity increment dt_k = y_k^2 / 4 of each vertical slit.
  std::vector<double> levels;
  std::vector<double> increments;
  // Cumulative capacity time after each step, starting with 0.
  std::vector<double> cumulative;
  // Largest |Im| of an already consumed point after full unzipping.
  double residual = 0.0;

  double horizon() const noexcept { return cumulative.back(); }
};

// Unzips a simple curve starting at 0 with vertical slits. Throws ZipperError
// naming the step when a remaining point is pushed onto or below the real axis.
ZipResult zip_curve(const Curve& curve);

// (t_k, hcap = 2 t_k) along the recovered capacity grid, starting at (0, 0).
std::vector<std::pair<double, double>> capacity_profile(const ZipResult& result);

}  // namespace loewner
