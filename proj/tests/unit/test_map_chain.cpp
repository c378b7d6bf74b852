#include <doctest.h>

#include <cmath>
#include <numbers>

#include "loewner/curve.hpp"
#include "loewner/error.hpp"
#include "loewner/map_chain.hpp"
#include "loewner/rng.hpp"

using namespace loewner;
using namespace std::complex_literals;

namespace {

Driver from_function(double (*f)(double), std::size_t n, double T = 1.0) {
  std::vector<double> v(n + 1);
  for (std::size_t k = 0; k <= n; ++k) v[k] = f(T * double(k) / double(n));
  v[0] = 0.0;
  return make_driver(v, T);
}

Driver random_pwl(std::uint64_t seed, std::size_t n) {
  GaussianStream g(seed);
  std::vector<double> nodes(5, 0.0);
  for (std::size_t j = 1; j < 5; ++j) nodes[j] = nodes[j - 1] + 0.5 * g.normal();
  const auto coarse = make_driver(nodes, 1.0);
  std::vector<double> v(n + 1);
  for (std::size_t k = 0; k <= n; ++k) v[k] = coarse.at(double(k) / double(n));
  return make_driver(v, 1.0);
}

}  // namespace

TEST_SUITE("map_chain") {
  TEST_CASE("upper square root branch") {
    CHECK(sqrt_upper(Complex(-4.0, 0.0)) == Complex(0.0, 2.0));
    CHECK(sqrt_upper(Complex(-4.0, -0.0)) == Complex(0.0, 2.0));
    CHECK(sqrt_upper(Complex(4.0, 0.0)) == Complex(2.0, 0.0));
    GaussianStream g(1);
    for (int i = 0; i < 1000; ++i) {
      const Complex z(3.0 * g.normal(), 3.0 * g.normal());
      const Complex s = sqrt_upper(z);
      CHECK(s.imag() >= 0.0);
      CHECK(std::abs(s * s - z) <= 1e-14 * (1.0 + std::abs(z)));
    }
  }

  TEST_CASE("slit maps invert each other") {
    GaussianStream g(2);
    for (int i = 0; i < 1000; ++i) {
      const Complex z(g.normal(), std::abs(g.normal()) + 0.01);
      const double u = g.normal(), dt = 0.01 * g.uniform();
      CHECK(std::abs(slit_inverse(slit_forward(z, u, dt), u, dt) - z) <= 1e-12);
    }
  }

  TEST_CASE("zero driver matches the closed-form maps") {
    const auto chain = build_chain(make_driver(std::vector<double>(101, 0.0), 1.0));
    for (double l : chain.levels()) CHECK(l == 0.0);
    // f_1(w) = sqrt(w^2 - 4), f_1'(w) = w / sqrt(w^2 - 4)
    CHECK(std::abs(chain.evaluate(100, 2i) - 2.0 * std::numbers::sqrt2 * 1i) <= 1e-12);
    CHECK(std::abs(chain.derivative(100, 2i) - 1.0 / std::numbers::sqrt2) <= 1e-12);
    CHECK(chain.evaluate(0, 0.3 + 0.7i) == 0.3 + 0.7i);
    CHECK(chain.derivative(0, 0.3 + 0.7i) == Complex(1.0));
    // Composition of forward slits: g_1(z) = sqrt(z^2 + 4)
    Complex z = 0.4 + 0.9i;
    for (std::size_t k = 0; k < 100; ++k) z = slit_forward(z, 0.0, chain.dt());
    CHECK(std::abs(z - sqrt_upper((0.4 + 0.9i) * (0.4 + 0.9i) + 4.0)) <= 1e-12);
    for (std::size_t k = 0; k <= 100; ++k)
      CHECK(std::abs(chain.tip(k) - Complex(0.0, 2.0 * std::sqrt(chain.time(k)))) <= 1e-12);
  }

  TEST_CASE("derivative agrees with central differences") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto chain = build_chain(random_pwl(s, 128));
      GaussianStream g(50 + s);
      for (int i = 0; i < 20; ++i) {
        const Complex z(g.normal(), 0.1 + std::abs(g.normal()));
        const std::size_t k = 1 + static_cast<std::size_t>(g.uniform() * 127.0);
        const double h = 1e-5;
        const Complex fd = (chain.evaluate(k, z + h) - chain.evaluate(k, z - h)) / (2.0 * h);
        const Complex d = chain.derivative(k, z);
        CHECK(std::abs(fd - d) <= 1e-6 * (1.0 + std::abs(d)));
        const auto both = chain.evaluate_with_derivative(k, z);
        CHECK(both.value == chain.evaluate(k, z));
        CHECK(both.derivative == d);
      }
    }
  }

  TEST_CASE("rejects points off the upper half-plane and off-grid times") {
    const auto chain = build_chain(random_pwl(1, 16));
    CHECK_THROWS_AS(chain.evaluate(4, 0.5), InvalidArgument);
    CHECK_THROWS_AS(chain.evaluate(4, 0.5 - 0.1i), InvalidArgument);
    CHECK_THROWS_AS(chain.evaluate(17, 1i), InvalidArgument);
    CHECK_THROWS_AS(chain.step_at(0.3), InvalidArgument);
    CHECK(chain.step_at(0.25) == 4);
  }

  TEST_CASE("zero-driver trace error at 10^4 steps") {
    const auto curve = trace(make_driver(std::vector<double>(10001, 0.0), 1.0));
    double err = 0.0;
    for (std::size_t k = 0; k < curve.size(); ++k)
      err = std::max(err, std::abs(curve[k] - Complex(0.0, 2.0 * std::sqrt(curve.times()[k]))));
    CHECK(err <= 1e-3);
  }

  TEST_CASE("trace of a finite-energy driver stays strictly inside") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto curve = trace(random_pwl(s, 200));
      for (std::size_t k = 1; k < curve.size(); ++k) CHECK(curve[k].imag() > 0.0);
    }
  }

  TEST_CASE("Brownian scaling symmetry of the trace") {
    const auto d = random_pwl(9, 64);
    const auto base = trace(d);
    for (double a : {0.5, 2.0, 3.0}) {
      std::vector<double> v(d.values().begin(), d.values().end());
      for (double& x : v) x *= a;
      const auto c = trace(make_driver(v, a * a));
      for (std::size_t k = 0; k < c.size(); ++k) CHECK(std::abs(c[k] - a * base[k]) <= 1e-12 * a);
    }
  }

  TEST_CASE("square-root driver traces a ray at the closed-form angle") {
    // lambda = c sqrt(t) gives the ray at angle alpha pi with c = 2 (1 - 2 alpha) / sqrt(alpha (1 - alpha)).
    const double alpha = 0.4;
    static double c;
    c = 2.0 * (1.0 - 2.0 * alpha) / std::sqrt(alpha * (1.0 - alpha));
    const std::size_t n = 2000;
    const auto curve = trace(from_function([](double t) { return c * std::sqrt(t); }, n));
    const double expected = alpha * std::numbers::pi;
    double lo = 10.0, hi = -10.0;
    for (std::size_t k = n / 10; k <= n; ++k) {
      const double a = std::arg(curve[k]);
      lo = std::min(lo, a);
      hi = std::max(hi, a);
      CHECK(std::abs(a - expected) <= 2e-2);
    }
    CHECK(hi - lo <= 1e-2);
  }

  TEST_CASE("trace error halves with the step on a smooth driver") {
    auto f = [](double t) { return std::sin(3.0 * t) + t; };
    static decltype(f)* fp;
    fp = &f;
    auto make = [](std::size_t n) { return from_function([](double t) { return (*fp)(t); }, n); };
    const std::size_t fine = 8192;
    const auto reference = trace(make(fine));
    double prev = 0.0;
    for (std::size_t n = 32; n <= 512; n *= 2) {
      const auto coarse = trace(make(n));
      double err = 0.0;
      for (std::size_t k = 0; k <= n; ++k) err = std::max(err, std::abs(coarse[k] - reference[k * (fine / n)]));
      if (prev > 0.0) CHECK(prev / err >= 1.8);
      prev = err;
    }
  }
}
