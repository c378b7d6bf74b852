#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "loewner/driver.hpp"
#include "loewner/map_chain.hpp"

namespace loewner {

// Points sampled at capacity times. Invariants: times start at 0 and increase
// strictly, Im points[k] >= 0. Traces additionally start at the origin; zip_curve
// checks that.
class Curve {
 public:
  static Curve make(std::vector<double> times, std::vector<Complex> points);

  std::size_t size() const noexcept { return points_.size(); }
  std::span<const double> times() const noexcept { return times_; }
  std::span<const Complex> points() const noexcept { return points_; }
  const Complex& operator[](std::size_t k) const noexcept { return points_[k]; }
  double horizon() const noexcept { return times_.back(); }

  friend bool operator==(const Curve&, const Curve&) = default;

 private:
  Curve(std::vector<double> t, std::vector<Complex> z) : times_(std::move(t)), points_(std::move(z)) {}

  std::vector<double> times_;
  std::vector<Complex> points_;
};

// gamma(t_k) for every grid time of the driver. O(n^2).
Curve trace(const Driver& driver);
Curve trace(const MapChain& chain);

// max_k |a(t_k) - b(t_k)|; rejects curves on different grids.
double sup_distance(const Curve& a, const Curve& b);

// Discrete Frechet distance: infimum over monotone alignments of the sampled
// points of the largest matched distance.
double reparam_distance(const Curve& a, const Curve& b);

}  // namespace loewner
