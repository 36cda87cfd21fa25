#include <stdexcept>
#include <vector>
#include <omp.h>

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "generators.hpp"
#include "kwising/quadrature.hpp"

using namespace kwising;

TEST_CASE("compensated sum recovers cancelled low-order terms") {
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1.0);
}

TEST_CASE("parallel and serial sums agree") {
  kwtest::Rng rng(11);
  for (std::int64_t n : {0, 1, 4095, 4096, 4097, 100000}) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = kwtest::uniform(rng, -1.0, 1.0);
    const auto term = [&](std::int64_t i) { return v[static_cast<std::size_t>(i)]; };
    CHECK(std::abs(parallel_sum(n, term) - serial_sum(n, term)) <= 1e-12);
  }
}

TEST_CASE("parallel sum is bitwise independent of the thread count") {
  const auto term = [](std::int64_t i) { return std::sin(0.001 * static_cast<double>(i)); };
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double one = parallel_sum(1 << 20, term);
  omp_set_num_threads(4);
  const double four = parallel_sum(1 << 20, term);
  omp_set_num_threads(saved);
  CHECK(one == four);
}

TEST_CASE("midpoint rule integrates trigonometric polynomials exactly") {
  const auto f = [](double k) { return 1.0 + 3.0 * std::cos(k) + std::cos(2.0 * k) * std::cos(2.0 * k); };
  CHECK(midpoint_periodic(f, 8) == doctest::Approx(3.0 * std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("periodic log integral matches its closed form") {
  // int log(a - cos k) dk = 2 pi log((a + sqrt(a^2 - 1)) / 2)
  const double a = 1.3;
  const auto f = [a](double k) { return std::log(a - std::cos(k)); };
  const QuadratureResult r = integrate_periodic(f, QuadratureSpec{});
  const double exact = 2.0 * std::numbers::pi * std::log((a + std::sqrt(a * a - 1.0)) / 2.0);
  CHECK(std::abs(r.value - exact) < 1e-10);
  CHECK(std::abs(integrate_periodic_serial(f, QuadratureSpec{}).value - exact) < 1e-10);
}

TEST_CASE("successive midpoint estimates contract at least fourfold for analytic integrands") {
  const auto f = [](double k) { return std::log(2.0 - std::cos(k)); };
  double prev_change = 0.0;
  double prev = midpoint_periodic(f, 4);
  for (std::int64_t n = 8; n <= 32; n *= 2) {
    const double cur = midpoint_periodic(f, n);
    const double change = std::abs(cur - prev);
    if (prev_change > 0.0 && change > 1e-15) CHECK(change * 4.0 <= prev_change);
    prev_change = change;
    prev = cur;
  }
}

TEST_CASE("2d tensor rule on a separable integrand") {
  const auto f = [](double a, double b) { return (2.0 + std::cos(a)) * (3.0 + std::sin(b)); };
  const double exact = 4.0 * std::numbers::pi * std::numbers::pi * 6.0;
  CHECK(integrate_periodic_2d(f, QuadratureSpec{}).value == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("non-converging quadrature reports its last two estimates") {
  QuadratureSpec spec;
  spec.max_doublings = 2;
  spec.tol = 1e-15;
  const auto f = [](double k) { return std::log(std::abs(std::sin(0.5 * k))); };
  try {
    integrate_periodic(f, spec);
    FAIL("expected QuadratureError");
  } catch (const QuadratureError& e) {
    CHECK(std::isfinite(e.previous()));
    CHECK(std::isfinite(e.last()));
    CHECK(e.previous() != e.last());
  }
}

TEST_CASE("non-finite integrands are rejected") {
  const auto f = [](double) { return std::nan(""); };
  CHECK_THROWS_AS(integrate_periodic(f, QuadratureSpec{}), QuadratureError);
}
