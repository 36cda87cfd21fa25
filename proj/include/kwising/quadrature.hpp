#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "kwising/errors.hpp"
#include "kwising/parallel.hpp"

namespace kwising {

struct QuadratureSpec {
  double tol = 1e-10;
  int initial_nodes = 64;
  int max_doublings = 14;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // |I(2N) - I(N)| at the accepted level
  std::int64_t nodes = 0;
};

/// Midpoint rule on [-pi, pi] with n nodes. Nodes sit at -pi + (j + 1/2) 2pi/n,
/// so for even n neither 0 nor pi is ever sampled.
template <class F>
double midpoint_periodic(F&& f, std::int64_t n) {
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
  return h * parallel_sum(n, [&](std::int64_t j) {
           return f(-std::numbers::pi + (static_cast<double>(j) + 0.5) * h);
         });
}

template <class F>
double midpoint_periodic_serial(F&& f, std::int64_t n) {
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
  return h * serial_sum(n, [&](std::int64_t j) {
           return f(-std::numbers::pi + (static_cast<double>(j) + 0.5) * h);
         });
}

/// Tensor midpoint rule on [-pi, pi]^2 with n x n nodes.
template <class F>
double midpoint_periodic_2d(F&& f, std::int64_t n) {
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
  const double s = parallel_sum(n * n, [&](std::int64_t idx) {
    const std::int64_t a = idx / n;
    const std::int64_t b = idx % n;
    return f(-std::numbers::pi + (static_cast<double>(a) + 0.5) * h,
             -std::numbers::pi + (static_cast<double>(b) + 0.5) * h);
  });
  return h * h * s;
}

/// Doubling driver: evaluates rule(n) for n = initial_nodes, 2n, 4n, ... until
/// two successive estimates differ by less than tol * max(1, |I|).
template <class Rule>
QuadratureResult integrate_doubling(Rule&& rule, const QuadratureSpec& spec) {
  std::int64_t n = spec.initial_nodes;
  double prev = rule(n);
  double cur = prev;
  for (int d = 0; d < spec.max_doublings; ++d) {
    n *= 2;
    prev = cur;
    cur = rule(n);
    if (!std::isfinite(cur)) {
      throw QuadratureError("non-finite quadrature estimate", prev, cur);
    }
    const double err = std::abs(cur - prev);
    if (err <= spec.tol * std::max(1.0, std::abs(cur))) {
      return {cur, err, n};
    }
  }
  throw QuadratureError("midpoint quadrature did not converge after " +
                            std::to_string(spec.max_doublings) + " doublings",
                        prev, cur);
}

/// Integrates a 2pi-periodic function over [-pi, pi] with the midpoint rule.
template <class F>
QuadratureResult integrate_periodic(F&& f, const QuadratureSpec& spec) {
  return integrate_doubling([&](std::int64_t n) { return midpoint_periodic(f, n); }, spec);
}

template <class F>
QuadratureResult integrate_periodic_serial(F&& f, const QuadratureSpec& spec) {
  return integrate_doubling([&](std::int64_t n) { return midpoint_periodic_serial(f, n); }, spec);
}

/// Tensor version on [-pi, pi]^2; nodes reports the per-axis count.
template <class F>
QuadratureResult integrate_periodic_2d(F&& f, const QuadratureSpec& spec) {
  return integrate_doubling([&](std::int64_t n) { return midpoint_periodic_2d(f, n); }, spec);
}

}  // namespace kwising
