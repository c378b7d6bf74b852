#include "loewner/driver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "loewner/error.hpp"
#include "loewner/rng.hpp"

namespace loewner {

EnergyValue::EnergyValue(double v) : value_(v) {
  if (std::isnan(v) || v < 0.0) throw InvalidArgument("energy must be a nonnegative extended real");
}

Driver Driver::make(std::vector<double> values, double horizon) {
  if (values.empty()) throw InvalidArgument("driver needs at least one sample");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidArgument("driver horizon must be positive and finite");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k]))
      throw InvalidArgument("driver sample " + std::to_string(k) + " is not finite");
  }
  if (values.front() != 0.0) throw InvalidArgument("driver must start at 0");
  if (values.size() == 1) values.push_back(0.0);
  return Driver(std::move(values), horizon);
}

double Driver::at(double t) const noexcept {
  if (t <= 0.0) return values_.front();
  if (t >= horizon_) return values_.back();
  const double s = t / dt();
  const auto k = std::min(static_cast<std::size_t>(s), steps() - 1);
  const double w = s - static_cast<double>(k);
  return (1.0 - w) * values_[k] + w * values_[k + 1];
}

double Driver::sup_norm() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Driver sample_brownian_driver(double kappa, double horizon, std::size_t steps, std::uint64_t seed) {
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  if (steps == 0) throw InvalidArgument("Brownian driver needs at least one step");
  if (!(horizon > 0.0)) throw InvalidArgument("driver horizon must be positive");
  GaussianStream stream(seed);
  const double sd = std::sqrt(horizon / static_cast<double>(steps));
  const double scale = std::sqrt(kappa);
  std::vector<double> values(steps + 1);
  double b = 0.0;
  values[0] = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    b += sd * stream.normal();
    values[k] = scale * b;
  }
  return Driver::make(std::move(values), horizon);
}

Driver pwl_approximation(const Driver& driver, std::size_t nodes) {
  const std::size_t n = driver.steps();
  if (nodes == 0 || n % nodes != 0)
    throw InvalidArgument("node count " + std::to_string(nodes) + " must divide step count " + std::to_string(n));
  const std::size_t stride = n / nodes;
  std::vector<double> out(n + 1);
  const auto lam = driver.values();
  for (std::size_t node = 0; node < nodes; ++node) {
    const double a = lam[node * stride];
    const double b = lam[(node + 1) * stride];
    for (std::size_t r = 0; r < stride; ++r) {
      const double w = static_cast<double>(r) / static_cast<double>(stride);
      out[node * stride + r] = a + w * (b - a);
    }
  }
  out[n] = lam[n];
  return Driver::make(std::move(out), driver.horizon());
}

EnergyValue dirichlet_energy(const Driver& driver) {
  const auto lam = driver.values();
  double sum = 0.0;
  for (std::size_t k = 1; k < lam.size(); ++k) {
    const double d = lam[k] - lam[k - 1];
    sum += d * d;
  }
  return EnergyValue(0.5 * sum / driver.dt());
}

double oscillation(const Driver& driver, double delta) {
  if (!(delta > 0.0) || delta > driver.horizon() * (1.0 + 1e-12))
    throw InvalidArgument("oscillation window must lie in (0, T]");
  const auto lam = driver.values();
  const auto window = std::min(driver.steps(),
                               static_cast<std::size_t>(std::floor(delta / driver.dt() * (1.0 + 1e-12))));
  if (window == 0) return 0.0;
  // Monotone deques of indices over windows [i - window, i].
  std::deque<std::size_t> hi, lo;
  double best = 0.0;
  for (std::size_t i = 0; i < lam.size(); ++i) {
    while (!hi.empty() && lam[hi.back()] <= lam[i]) hi.pop_back();
    while (!lo.empty() && lam[lo.back()] >= lam[i]) lo.pop_back();
    hi.push_back(i);
    lo.push_back(i);
    if (hi.front() + window < i) hi.pop_front();
    if (lo.front() + window < i) lo.pop_front();
    best = std::max(best, lam[hi.front()] - lam[lo.front()]);
  }
  return best;
}

namespace {

void require_same_grid(const Driver& a, const Driver& b) {
  if (a.steps() != b.steps() || a.horizon() != b.horizon())
    throw InvalidArgument("drivers live on different grids");
}

}  // namespace

double sup_distance(const Driver& a, const Driver& b) {
  require_same_grid(a, b);
  double m = 0.0;
  for (std::size_t k = 0; k <= a.steps(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double sup_distance_on_grid(const Driver& reference, const Driver& other) {
  double m = 0.0;
  for (std::size_t k = 0; k <= reference.steps(); ++k)
    m = std::max(m, std::abs(reference[k] - other.at(reference.time(k))));
  return m;
}

Driver difference(const Driver& a, const Driver& b) {
  require_same_grid(a, b);
  std::vector<double> v(a.steps() + 1);
  for (std::size_t k = 0; k <= a.steps(); ++k) v[k] = a[k] - b[k];
  return Driver::make(std::move(v), a.horizon());
}

Driver scaled(const Driver& driver, double c) {
  std::vector<double> v(driver.values().begin(), driver.values().end());
  for (double& x : v) x *= c;
  // -0.0 * c keeps lambda_0 == 0 under operator==
  v[0] = 0.0;
  return Driver::make(std::move(v), driver.horizon());
}

namespace {

// Gaussian-smoothed slopes, normalized by the kernel mass inside [0, T] so
// constant slopes are reproduced exactly.
std::vector<double> smooth_slopes(std::span<const double> slopes, double dt, double bandwidth) {
  const std::size_t n = slopes.size();
  std::vector<double> out(n);
  if (std::isinf(bandwidth)) {
    double mean = 0.0;
    for (double s : slopes) mean += s;
    std::fill(out.begin(), out.end(), mean / static_cast<double>(n));
    return out;
  }
  const auto reach = static_cast<std::ptrdiff_t>(std::ceil(5.0 * bandwidth / dt));
  std::vector<double> kernel(static_cast<std::size_t>(reach) + 1);
  for (std::ptrdiff_t d = 0; d <= reach; ++d) {
    const double x = static_cast<double>(d) * dt / bandwidth;
    kernel[static_cast<std::size_t>(d)] = std::exp(-0.5 * x * x);
  }
  const auto sn = static_cast<std::ptrdiff_t>(n);
  for (std::ptrdiff_t k = 0; k < sn; ++k) {
    double num = 0.0, mass = 0.0;
    const auto lo = std::max<std::ptrdiff_t>(0, k - reach);
    const auto hi = std::min<std::ptrdiff_t>(sn - 1, k + reach);
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      const double w = kernel[static_cast<std::size_t>(std::abs(j - k))];
      num += w * slopes[static_cast<std::size_t>(j)];
      mass += w;
    }
    out[static_cast<std::size_t>(k)] = num / mass;
  }
  return out;
}

}  // namespace

MollifyResult mollify_with_report(const Driver& driver, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("mollify needs eps > 0");
  if (!dirichlet_energy(driver).finite()) throw MollifyError("driver has infinite energy");
  const std::size_t n = driver.steps();
  const double dt = driver.dt();
  const auto lam = driver.values();
  std::vector<double> slopes(n);
  for (std::size_t k = 0; k < n; ++k) slopes[k] = (lam[k + 1] - lam[k]) / dt;

  const double target = 0.5 * eps * eps;
  const double finest = dt / 8.0;
  double bandwidth = std::numeric_limits<double>::infinity();
  double next = driver.horizon();
  while (true) {
    const auto smooth = smooth_slopes(slopes, dt, bandwidth);
    double gap = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = slopes[k] - smooth[k];
      gap += d * d;
    }
    gap *= 0.5 * dt;
    if (gap < target) {
      std::vector<double> phi(n + 1, 0.0);
      double sup_gap = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        phi[k + 1] = phi[k] + smooth[k] * dt;
        sup_gap = std::max(sup_gap, std::abs(phi[k + 1] - lam[k + 1]));
      }
      return {Driver::make(std::move(phi), driver.horizon()), bandwidth, gap, sup_gap};
    }
    if (bandwidth <= finest)
      throw MollifyError("energy gap " + std::to_string(gap) + " above target at finest bandwidth");
    bandwidth = next;
    next *= 0.5;
  }
}

}  // namespace loewner
