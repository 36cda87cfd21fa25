#include "kwising/critical_point.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "kwising/thermodynamics.hpp"

namespace kwising {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Returns the minimizer of x -> sum_i s_i (1 - cos k_i) along one coordinate:
// the k-dependent part is -Re[e^{ik}(s_own + s3 e^{i other})].
double coordinate_min(double s_own, double s3, double other) {
  const std::complex<double> z = s_own + s3 * std::polar(1.0, other);
  return std::abs(z) == 0 ? 0.0 : -std::arg(z);
}

double h_value(const std::array<double, 3>& s, double k1, double k2) {
  return s[0] * (1 - std::cos(k1)) + s[1] * (1 - std::cos(k2)) + s[2] * (1 - std::cos(k1 + k2));
}

std::array<double, 3> sinh2(double beta, const Couplings& J) {
  return {std::sinh(2 * beta * J.J1), std::sinh(2 * beta * J.J2), std::sinh(2 * beta * J.J3)};
}

}  // namespace

double a_of_beta(double beta, double J3, double J12) {
  const double t = std::tanh(beta * J12);
  const double tau = std::tanh(beta * J3);
  return 1 + t * t * tau - 2 * t - tau - t * t - 2 * t * tau;
}

double a_prime(double beta, double J3) {
  const double t = std::tanh(beta);
  const double tau = std::tanh(beta * J3);
  return -2 * (1 - t * t) * (1 + t + (1 - t) * tau) - J3 * (1 + 2 * t - t * t) * (1 - tau * tau);
}

double a_prime_at_root(double t, double J3) {
  return -4 * (1 - t * t) * (1 + t * t + 2 * t * J3) / (1 + 2 * t - t * t);
}

double j_of_t(double t) {
  if (!(t > 0 && t < 1)) throw std::domain_error("j_of_t needs 0 < t < 1");
  // 1 + 2t - t^2 > 1 on (0, 1), so the ratio lies in (-1, 1); artanh of it is
  // 1/2 log((1 - t^2) / (2t)), free of the cancellation near t = 1.
  const double numerator = 0.5 * std::log((1 - t) * (1 + t) / (2 * t));
  return numerator / std::atanh(t);
}

std::optional<double> solve_beta_c(double J3) {
  if (!std::isfinite(J3)) throw std::invalid_argument("J3 must be finite");
  if (J3 <= -1) return std::nullopt;
  // With t = tanh(beta), j(t) = -log(sinh 2 beta) / (2 beta), so j(t) = J3 iff
  // phi(beta) = log(sinh 2 beta) + 2 beta J3 = 0. phi increases strictly for
  // J3 > -1; near J3 = -1 the root sits where t is within e^-700 of 1, out of
  // reach of a bisection in t.
  auto phi = [J3](double beta) {
    return 2 * beta * (1 + J3) - std::numbers::ln2 + std::log1p(-std::exp(-4 * beta));
  };
  double lo = 0.0;
  double hi = 1.0;
  while (phi(hi) < 0) {
    lo = hi;
    hi *= 2;
  }
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (phi(mid) < 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

CriticalResult beta_c_from_J3(double J3) {
  CriticalResult r;
  r.method = CriticalMethod::CdclInversion;
  r.beta_c = solve_beta_c(J3);
  if (!r.beta_c) return r;
  r.gap_min_location = {0.0, 0.0};
  r.hypotheses = singularity_hypotheses(Couplings{1.0, 1.0, J3}, *r.beta_c);
  return r;
}

std::optional<double> critical_beta(const Couplings& J) {
  if (J.J1 != J.J2 || J.J1 == 0.0) return std::nullopt;
  const double scale = std::abs(J.J1);
  const auto beta_c = solve_beta_c(J.J3 / scale);
  if (!beta_c) return std::nullopt;
  return *beta_c / scale;
}

HMinimum min_h(double beta, const Couplings& J) {
  if (J.J1 == J.J2 && J.J1 > 0) {
    const double s = std::sinh(2 * beta * J.J1);
    const double alpha = -std::sinh(2 * beta * J.J3) / s;
    if (alpha <= 0.5) return {0.0, {0.0, 0.0}};
    const double k = std::acos(1 / (2 * alpha));
    return {2 * s * (1 - alpha - 1 / (4 * alpha)), {k, k}};
  }
  return min_h_grid(beta, J);
}

HMinimum min_h_grid(double beta, const Couplings& J) {
  const auto s = sinh2(beta, J);
  constexpr int n = kHypothesisGrid;
  const double step = 2 * kPi / n;
  HMinimum best{0.0, {0.0, 0.0}};  // h(0, 0) = 0 exactly
  for (int a = 0; a < n; ++a) {
    const double k1 = -kPi + (a + 0.5) * step;
    for (int b = 0; b < n; ++b) {
      const double k2 = -kPi + (b + 0.5) * step;
      const double v = h_value(s, k1, k2);
      if (v < best.value) best = {v, {k1, k2}};
    }
  }
  double k1 = best.argmin.k1, k2 = best.argmin.k2;
  double value = best.value;
  for (int it = 0; it < 100000; ++it) {
    k1 = coordinate_min(s[0], s[2], k2);
    k2 = coordinate_min(s[1], s[2], k1);
    const double next = h_value(s, k1, k2);
    const bool done = std::abs(value - next) <= 1e-12 * std::max(1.0, std::abs(next)) && it > 0;
    value = std::min(value, next);
    if (done) break;
  }
  const double final_value = h_value(s, k1, k2);
  if (final_value <= best.value) best = {final_value, {k1, k2}};
  return best;
}

SingularityHypotheses singularity_hypotheses(const Couplings& J, double beta_c) {
  SingularityHypotheses r;
  r.g2 = eval_gh(beta_c, {0.0, 0.0}, J).g2;
  const auto s = sinh2(beta_c, J);
  constexpr int n = kHypothesisGrid;
  const double step = 2 * kPi / n;
  double c = std::numeric_limits<double>::infinity();
  for (int a = 0; a < n; ++a) {
    const double k1 = -kPi + (a + 0.5) * step;
    for (int b = 0; b < n; ++b) {
      const double k2 = -kPi + (b + 0.5) * step;
      c = std::min(c, h_value(s, k1, k2) / (k1 * k1 + k2 * k2));
    }
  }
  r.c = std::max(c, 0.0);
  r.sufficient_condition = s[0] + 2 * s[2] > 0 && s[1] + 2 * s[2] > 0;
  if (J.J1 == 1.0 && J.J2 == 1.0) {
    r.a_prime = a_prime(beta_c, J.J3);
    r.a_prime_closed = a_prime_at_root(std::tanh(beta_c), J.J3);
  } else {
    r.a_prime = kNaN;
    r.a_prime_closed = kNaN;
  }
  return r;
}

std::vector<PhaseRow> phase_diagram_sweep(const std::vector<double>& J3_values) {
  std::vector<PhaseRow> rows(J3_values.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < J3_values.size(); ++i) {
    const CriticalResult r = beta_c_from_J3(J3_values[i]);
    rows[i] = {J3_values[i], r.beta_c, r.hypotheses};
  }
  return rows;
}

CriticalResult gap_scan(const Couplings& J, double beta_lo, double beta_hi, int steps) {
  if (!(beta_lo > 0 && beta_hi > beta_lo) || steps < 3) {
    throw std::invalid_argument("gap_scan needs 0 < beta_lo < beta_hi and steps >= 3");
  }
  // sqrt of the relative gap vanishes linearly at a critical point, so
  // golden-section refinement around the smallest sample locates it.
  auto relative_gap = [&](double beta) {
    const GapMinimum g = min_gap(beta, J);
    const double scale = std::max(1.0, eval_gh(beta, {0.0, 0.0}, J).g + 3 * std::cosh(2 * beta * J.max_abs()));
    return std::sqrt(std::max(g.value, 0.0) / scale);
  };
  const double step = (beta_hi - beta_lo) / (steps - 1);
  std::vector<double> values(static_cast<std::size_t>(steps));
#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < steps; ++i) values[static_cast<std::size_t>(i)] = relative_gap(beta_lo + i * step);
  const auto best = static_cast<int>(std::min_element(values.begin(), values.end()) - values.begin());
  double lo = beta_lo + std::max(best - 1, 0) * step;
  double hi = beta_lo + std::min(best + 1, steps - 1) * step;
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = relative_gap(x1), f2 = relative_gap(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = relative_gap(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = relative_gap(x2);
    }
  }
  const double beta = 0.5 * (lo + hi);
  CriticalResult r;
  r.method = CriticalMethod::GapScan;
  r.gap_min_location = min_gap(beta, J).argmin;
  if (relative_gap(beta) <= 1e-6) r.beta_c = beta;
  return r;
}

}  // namespace kwising
