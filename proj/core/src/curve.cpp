#include "loewner/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "loewner/error.hpp"

namespace loewner {

Curve Curve::make(std::vector<double> times, std::vector<Complex> points) {
  if (points.empty()) throw InvalidArgument("curve needs at least one point");
  if (times.size() != points.size()) throw InvalidArgument("curve times and points differ in length");
  if (times.front() != 0.0) throw InvalidArgument("curve times must start at 0");
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!std::isfinite(points[k].real()) || !std::isfinite(points[k].imag()) || !std::isfinite(times[k]))
      throw InvalidArgument("curve sample " + std::to_string(k) + " is not finite");
    if (points[k].imag() < 0.0) throw InvalidArgument("curve point " + std::to_string(k) + " below the real axis");
    if (k > 0 && !(times[k] > times[k - 1]))
      throw InvalidArgument("curve times must increase strictly");
  }
  return Curve(std::move(times), std::move(points));
}

Curve trace(const MapChain& chain) {
  const std::size_t n = chain.steps();
  std::vector<double> times(n + 1);
  std::vector<Complex> points(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    times[k] = chain.time(k);
    points[k] = chain.tip(k);
  }
  return Curve::make(std::move(times), std::move(points));
}

Curve trace(const Driver& driver) { return trace(MapChain::build(driver)); }

double sup_distance(const Curve& a, const Curve& b) {
  if (a.size() != b.size()) throw InvalidArgument("curves have different sample counts");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double ta = a.times()[k], tb = b.times()[k];
    if (std::abs(ta - tb) > 1e-12 * std::max(1.0, std::abs(ta)))
      throw InvalidArgument("curves live on different time grids");
    m = std::max(m, std::abs(a[k] - b[k]));
  }
  return m;
}

double reparam_distance(const Curve& a, const Curve& b) {
  const std::size_t n = a.size(), m = b.size();
  // Row-by-row discrete Frechet recursion.
  std::vector<double> prev(m), cur(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = std::abs(a[i] - b[j]);
      double reach;
      if (i == 0 && j == 0)
        reach = d;
      else if (i == 0)
        reach = cur[j - 1];
      else if (j == 0)
        reach = prev[0];
      else
        reach = std::min({prev[j], prev[j - 1], cur[j - 1]});
      cur[j] = std::max(reach, d);
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

}  // namespace loewner
