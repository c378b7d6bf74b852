#include "loewner/map_chain.hpp"

#include <string>

#include "loewner/error.hpp"

namespace loewner {

MapChain MapChain::build(const Driver& driver) {
  const auto lam = driver.values();
  std::vector<double> levels(driver.steps());
  for (std::size_t k = 1; k < lam.size(); ++k) levels[k - 1] = 0.5 * (lam[k - 1] + lam[k]);
  return MapChain(std::move(levels), driver.dt(), driver.horizon());
}

std::size_t MapChain::step_at(double t) const {
  const double s = t / horizon_ * static_cast<double>(steps());
  const double k = std::round(s);
  if (k < 0.0 || k > static_cast<double>(steps()) || std::abs(s - k) > 1e-9 * (1.0 + std::abs(s)))
    throw InvalidArgument("time " + std::to_string(t) + " is not on the chain grid");
  return static_cast<std::size_t>(k);
}

void MapChain::check_step(std::size_t k) const {
  if (k > steps()) throw InvalidArgument("step index " + std::to_string(k) + " beyond chain length");
}

Complex MapChain::evaluate(std::size_t k, Complex z) const {
  check_step(k);
  if (!(z.imag() > 0.0)) throw InvalidArgument("map evaluation needs Im z > 0");
  Complex w = z;
  for (std::size_t j = k; j-- > 0;) {
    w = slit_inverse(w, levels_[j], dt_);
    if (!(w.imag() > 0.0)) throw SingularityError("orbit left the upper half-plane", j + 1);
  }
  return w;
}

MapValue MapChain::evaluate_with_derivative(std::size_t k, Complex z) const {
  check_step(k);
  if (!(z.imag() > 0.0)) throw InvalidArgument("map evaluation needs Im z > 0");
  double wr = z.real(), wi = z.imag();
  double dr = 1.0, di = 0.0;
  for (std::size_t j = k; j-- > 0;) {
    const double x = wr - levels_[j], y = wi;
    const Complex s = sqrt_upper({x * x - y * y - 4.0 * dt_, 2.0 * x * y});
    // deriv *= (x + iy) / s, spelled out to avoid the checked complex helpers
    const double inv = 1.0 / (s.real() * s.real() + s.imag() * s.imag());
    const double qr = (x * s.real() + y * s.imag()) * inv;
    const double qi = (y * s.real() - x * s.imag()) * inv;
    const double nr = dr * qr - di * qi;
    di = dr * qi + di * qr;
    dr = nr;
    wr = levels_[j] + s.real();
    wi = s.imag();
    if (!(wi > 0.0)) throw SingularityError("orbit left the upper half-plane", j + 1);
  }
  const Complex w{wr, wi};
  const Complex deriv{dr, di};
  return {w, deriv};
}

Complex MapChain::derivative(std::size_t k, Complex z) const {
  return evaluate_with_derivative(k, z).derivative;
}

Complex MapChain::tip(std::size_t k) const {
  check_step(k);
  if (k == 0) return {0.0, 0.0};
  Complex w{levels_[k - 1], 2.0 * std::sqrt(dt_)};
  for (std::size_t j = k - 1; j-- > 0;) {
    w = slit_inverse(w, levels_[j], dt_);
    if (!(w.imag() > 0.0)) throw SingularityError("trace orbit left the upper half-plane", j + 1);
  }
  return w;
}

}  // namespace loewner
