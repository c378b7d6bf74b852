#include "loewner/zipper.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "loewner/error.hpp"
#include "loewner/map_chain.hpp"

namespace loewner {

namespace {

// Slit levels belong to the middle of their capacity step; resample them with the
// anchor (0, 0) onto a uniform grid, extrapolating linearly past the last midpoint.
Driver resample_levels(const std::vector<double>& levels, const std::vector<double>& cumulative) {
  const std::size_t n = levels.size();
  std::vector<double> knot_t(n + 1), knot_v(n + 1);
  knot_t[0] = 0.0;
  knot_v[0] = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    knot_t[k + 1] = 0.5 * (cumulative[k] + cumulative[k + 1]);
    knot_v[k + 1] = levels[k];
  }
  const double horizon = cumulative.back();
  std::vector<double> values(n + 1);
  values[0] = 0.0;
  std::size_t seg = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double t = horizon * static_cast<double>(k) / static_cast<double>(n);
    while (seg + 2 <= n && knot_t[seg + 1] < t) ++seg;
    const double t0 = knot_t[seg], t1 = knot_t[seg + 1];
    const double w = (t - t0) / (t1 - t0);
    values[k] = knot_v[seg] + w * (knot_v[seg + 1] - knot_v[seg]);
  }
  return Driver::make(std::move(values), horizon);
}

}  // namespace

ZipResult zip_curve(const Curve& curve) {
  const auto pts = curve.points();
  if (pts.front() != Complex{0.0, 0.0}) throw InvalidArgument("zipper input must start at the origin");
  const std::size_t n = pts.size() - 1;
  ZipResult out;
  out.cumulative.assign(1, 0.0);
  if (n == 0) return out;
  for (std::size_t k = 1; k <= n; ++k) {
    if (!(pts[k].imag() > 0.0))
      throw ZipperError("curve point on the real axis; input not simple", k);
  }

  std::vector<double> re(n), im(n);
  for (std::size_t k = 0; k < n; ++k) {
    re[k] = pts[k + 1].real();
    im[k] = pts[k + 1].imag();
  }
  out.levels.reserve(n);
  out.increments.reserve(n);
  out.cumulative.reserve(n + 1);

  for (std::size_t step = 0; step < n; ++step) {
    const double x = re[step];
    const double y = im[step];
    if (!(y > 0.0)) throw ZipperError("point pushed onto the real axis; input not simple", step + 1);
    const double dt = 0.25 * y * y;
    out.levels.push_back(x);
    out.increments.push_back(dt);
    out.cumulative.push_back(out.cumulative.back() + dt);
    // consumed points (indices <= step) should stay on the real line
    for (std::size_t j = 0; j < n; ++j) {
      const Complex w = slit_forward({re[j], im[j]}, x, dt);
      re[j] = w.real();
      im[j] = w.imag();
      if (j > step && !(im[j] > 0.0))
        throw ZipperError("point " + std::to_string(j + 1) + " pushed onto the real axis; input not simple", step + 1);
    }
  }
  for (std::size_t j = 0; j < n; ++j) out.residual = std::max(out.residual, std::abs(im[j]));
  out.driver = resample_levels(out.levels, out.cumulative);
  return out;
}

std::vector<std::pair<double, double>> capacity_profile(const ZipResult& result) {
  std::vector<std::pair<double, double>> profile;
  profile.reserve(result.cumulative.size());
  for (double t : result.cumulative) profile.emplace_back(t, 2.0 * t);
  return profile;
}

}  // namespace loewner
