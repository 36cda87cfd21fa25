#include "kwising/thermodynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "kwising/critical_point.hpp"
#include "kwising/errors.hpp"

namespace kwising {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// cosh(2 beta J_i), sinh(2 beta J_i) and the products C, S with their first
// and second beta-derivatives.
struct Hyperbolic {
  std::array<double, 3> c{}, c1{}, c2{};
  std::array<double, 3> s{}, s1{}, s2{};
  double C = 0, C1 = 0, C2 = 0;
  double S = 0, S1 = 0, S2 = 0;
};

template <class A>
void product_derivatives(const A& x, const A& x1, const A& x2, double& P, double& P1, double& P2) {
  P = x[0] * x[1] * x[2];
  P1 = x1[0] * x[1] * x[2] + x[0] * x1[1] * x[2] + x[0] * x[1] * x1[2];
  P2 = x2[0] * x[1] * x[2] + x[0] * x2[1] * x[2] + x[0] * x[1] * x2[2] +
       2 * (x1[0] * x1[1] * x[2] + x1[0] * x[1] * x1[2] + x[0] * x1[1] * x1[2]);
}

Hyperbolic hyperbolic(double beta, const Couplings& J) {
  Hyperbolic H;
  const auto j = J.as_array();
  for (std::size_t i = 0; i < 3; ++i) {
    const double x = 2 * beta * j[i];
    H.c[i] = std::cosh(x);
    H.s[i] = std::sinh(x);
    H.c1[i] = 2 * j[i] * H.s[i];
    H.s1[i] = 2 * j[i] * H.c[i];
    H.c2[i] = 4 * j[i] * j[i] * H.c[i];
    H.s2[i] = 4 * j[i] * j[i] * H.s[i];
  }
  product_derivatives(H.c, H.c1, H.c2, H.C, H.C1, H.C2);
  product_derivatives(H.s, H.s1, H.s2, H.S, H.S1, H.S2);
  return H;
}

// g + h = a(k1) - sqrt(Q(k1)) cos(k2 + phi); the k2 integral of log(g + h)
// is 2 pi log((a + sqrt(a^2 - Q)) / 2).
struct Reduced {
  double a = 0, a1 = 0, a2 = 0;
  double Q = 0, Q1 = 0, Q2 = 0;
};

Reduced reduced(const Hyperbolic& H, double k1) {
  const double ck = std::cos(k1);
  Reduced r;
  r.a = H.C + H.S - H.s[0] * ck;
  r.a1 = H.C1 + H.S1 - H.s1[0] * ck;
  r.a2 = H.C2 + H.S2 - H.s2[0] * ck;
  const double s2 = H.s[1], s3 = H.s[2];
  const double d2 = H.s1[1], d3 = H.s1[2];
  const double e2 = H.s2[1], e3 = H.s2[2];
  r.Q = s2 * s2 + s3 * s3 + 2 * s2 * s3 * ck;
  r.Q1 = 2 * s2 * d2 + 2 * s3 * d3 + 2 * (d2 * s3 + s2 * d3) * ck;
  r.Q2 = 2 * (d2 * d2 + s2 * e2) + 2 * (d3 * d3 + s3 * e3) + 2 * (e2 * s3 + 2 * d2 * d3 + s2 * e3) * ck;
  return r;
}

double reduced_log(const Hyperbolic& H, double k1) {
  const Reduced r = reduced(H, k1);
  const double D = std::max(r.a * r.a - r.Q, 0.0);
  return std::log((r.a + std::sqrt(D)) / 2);
}

struct ReducedDerivatives {
  double F1 = 0.0;
  double F2 = 0.0;
};

// beta-derivatives of log((a + u) / 2), u = sqrt(a^2 - Q).
ReducedDerivatives reduced_derivatives(const Hyperbolic& H, double k1) {
  const Reduced r = reduced(H, k1);
  const double D = r.a * r.a - r.Q;
  if (!(D > 0)) return {kNaN, kNaN};
  const double D1 = 2 * r.a * r.a1 - r.Q1;
  const double D2 = 2 * r.a1 * r.a1 + 2 * r.a * r.a2 - r.Q2;
  const double u = std::sqrt(D);
  const double u1 = D1 / (2 * u);
  const double u2 = D2 / (2 * u) - D1 * D1 / (4 * u * u * u);
  const double P = r.a + u;
  const double P1 = r.a1 + u1;
  const double P2 = r.a2 + u2;
  return {P1 / P, P2 / P - (P1 * P1) / (P * P)};
}

double scale_of(const Hyperbolic& H) { return std::max(1.0, H.C + std::abs(H.S)); }

void check_exclusion(double beta, const Couplings& J) {
  if (const auto bc = critical_beta(J)) {
    if (std::abs(beta - *bc) <= kCriticalExclusion) {
      throw CriticalExclusion("beta = " + std::to_string(beta) +
                              " lies in the exclusion zone of the critical point");
    }
    return;
  }
  const GapMinimum gap = min_gap(beta, J);
  const double scale = scale_of(hyperbolic(beta, J));
  if (gap.value <= 64 * std::numeric_limits<double>::epsilon() * scale) {
    throw CriticalExclusion("min_k (g + h) vanishes at beta = " + std::to_string(beta));
  }
}

template <class Rule>
QuadratureResult cylinder_impl(int M, const Couplings& J, const QuadratureSpec& quad, Rule&& rule) {
  if (M < 2) throw std::invalid_argument("cylinder_free_energy needs M >= 2");
  const Hyperbolic H = hyperbolic(1.0, J);
  std::vector<double> cos2(static_cast<std::size_t>(M)), k2(static_cast<std::size_t>(M));
  for (int b = 0; b < M; ++b) {
    k2[static_cast<std::size_t>(b)] = 2 * kPi * b / M + kPi / M;
    cos2[static_cast<std::size_t>(b)] = std::cos(k2[static_cast<std::size_t>(b)]);
  }
  const double base = H.C + H.S;
  const double norm = -1.0 / (4 * kPi * M);
  auto integrand = [&](double k1) {
    const double c1 = std::cos(k1);
    double acc = 0.0;
    for (int b = 0; b < M; ++b) {
      const auto i = static_cast<std::size_t>(b);
      const double v = base - H.s[0] * c1 - H.s[1] * cos2[i] - H.s[2] * std::cos(k1 + k2[i]);
      acc += std::log(v);
    }
    return norm * acc;
  };
  QuadratureResult r = rule(integrand, quad);
  r.value -= std::numbers::ln2;
  return r;
}

}  // namespace

GHDecomposition eval_gh(double beta, const MomentumPoint& k, const Couplings& J) {
  const Hyperbolic H = hyperbolic(beta, J);
  GHDecomposition r;
  r.g = H.C + H.S - (H.s[0] + H.s[1] + H.s[2]);
  r.g1 = H.C1 + H.S1 - (H.s1[0] + H.s1[1] + H.s1[2]);
  r.g2 = H.C2 + H.S2 - (H.s2[0] + H.s2[1] + H.s2[2]);
  const std::array<double, 3> kk = {k.k1, k.k2, k.k3()};
  for (std::size_t i = 0; i < 3; ++i) {
    const double w = 1 - std::cos(kk[i]);
    r.h += H.s[i] * w;
    r.h1 += H.s1[i] * w;
    r.h2 += H.s2[i] * w;
  }
  return r;
}

QuadratureResult cylinder_free_energy(int M, const Couplings& J, const QuadratureSpec& quad) {
  return cylinder_impl(M, J, quad, [](auto& f, const QuadratureSpec& q) { return integrate_periodic(f, q); });
}

QuadratureResult cylinder_free_energy_serial(int M, const Couplings& J, const QuadratureSpec& quad) {
  return cylinder_impl(M, J, quad,
                       [](auto& f, const QuadratureSpec& q) { return integrate_periodic_serial(f, q); });
}

double cylinder_free_energy_closed(int M, const Couplings& J) {
  if (M < 2) throw std::invalid_argument("cylinder_free_energy_closed needs M >= 2");
  const Hyperbolic H = hyperbolic(1.0, J);
  CompensatedSum acc;
  for (int b = 0; b < M; ++b) {
    const double k2 = 2 * kPi * b / M + kPi / M;
    // g + h = A - Re[e^{i k1} (s1 + s3 e^{i k2})]
    const double A = H.C + H.S - H.s[1] * std::cos(k2);
    const double R2 = H.s[0] * H.s[0] + H.s[2] * H.s[2] + 2 * H.s[0] * H.s[2] * std::cos(k2);
    acc.add(std::log((A + std::sqrt(std::max(A * A - R2, 0.0))) / 2));
  }
  return -std::numbers::ln2 - acc.value() / (2.0 * M);
}

QuadratureResult plane_free_energy(const Couplings& J, const QuadratureSpec& quad) {
  const Hyperbolic H = hyperbolic(1.0, J);
  QuadratureResult r =
      integrate_periodic([&](double k1) { return -reduced_log(H, k1) / (4 * kPi); }, quad);
  r.value -= std::numbers::ln2;
  return r;
}

QuadratureResult plane_free_energy_grid(const Couplings& J, const QuadratureSpec& quad) {
  const Hyperbolic H = hyperbolic(1.0, J);
  const double base = H.C + H.S;
  QuadratureResult r = integrate_periodic_2d(
      [&](double k1, double k2) {
        const double v = base - H.s[0] * std::cos(k1) - H.s[1] * std::cos(k2) - H.s[2] * std::cos(k1 + k2);
        return -std::log(v) / (8 * kPi * kPi);
      },
      quad);
  r.value -= std::numbers::ln2;
  return r;
}

FreeEnergyDerivatives free_energy_derivatives(double beta, const Couplings& J, const QuadratureSpec& quad) {
  if (!(beta > 0)) throw std::invalid_argument("free_energy_derivatives needs beta > 0");
  check_exclusion(beta, J);
  const Hyperbolic H = hyperbolic(beta, J);
  const QuadratureResult r1 = integrate_periodic(
      [&](double k1) { return -reduced_derivatives(H, k1).F1 / (4 * kPi); }, quad);
  const QuadratureResult r2 = integrate_periodic(
      [&](double k1) { return -reduced_derivatives(H, k1).F2 / (4 * kPi); }, quad);
  return {r1.value, r2.value, std::max(r1.error, r2.error)};
}

FreeEnergyDerivatives free_energy_derivatives_grid(double beta, const Couplings& J,
                                                   const QuadratureSpec& quad) {
  if (!(beta > 0)) throw std::invalid_argument("free_energy_derivatives_grid needs beta > 0");
  check_exclusion(beta, J);
  const Hyperbolic H = hyperbolic(beta, J);
  const double norm = -1.0 / (8 * kPi * kPi);
  auto parts = [&](double k1, double k2) {
    const double c[3] = {std::cos(k1), std::cos(k2), std::cos(k1 + k2)};
    double v = H.C + H.S, v1 = H.C1 + H.S1, v2 = H.C2 + H.S2;
    for (std::size_t i = 0; i < 3; ++i) {
      v -= H.s[i] * c[i];
      v1 -= H.s1[i] * c[i];
      v2 -= H.s2[i] * c[i];
    }
    return std::array<double, 3>{v, v1, v2};
  };
  const QuadratureResult r1 = integrate_periodic_2d(
      [&](double k1, double k2) {
        const auto p = parts(k1, k2);
        return norm * p[1] / p[0];
      },
      quad);
  const QuadratureResult r2 = integrate_periodic_2d(
      [&](double k1, double k2) {
        const auto p = parts(k1, k2);
        return norm * (p[2] / p[0] - (p[1] * p[1]) / (p[0] * p[0]));
      },
      quad);
  return {r1.value, r2.value, std::max(r1.error, r2.error)};
}

GapMinimum min_gap(double beta, const Couplings& J) {
  const Hyperbolic H = hyperbolic(beta, J);
  auto gap = [&](double k1) {
    const Reduced r = reduced(H, k1);
    return r.a - std::sqrt(std::max(r.Q, 0.0));
  };
  constexpr int n = 4096;
  const double step = 2 * kPi / n;
  int best = 0;
  double best_value = gap(-kPi);
  for (int j = 1; j < n; ++j) {
    const double v = gap(-kPi + j * step);
    if (v < best_value) {
      best_value = v;
      best = j;
    }
  }
  // Golden-section refinement inside the bracketing cell pair.
  double lo = -kPi + (best - 1) * step;
  double hi = -kPi + (best + 1) * step;
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = gap(x1), f2 = gap(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-14; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = gap(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = gap(x2);
    }
  }
  double k1 = -kPi + best * step;
  double value = best_value;
  if (std::min(f1, f2) < value) {
    k1 = f1 < f2 ? x1 : x2;
    value = std::min(f1, f2);
  }
  // At the minimizing k2, e^{i k2}(s2 + s3 e^{i k1}) is real and positive.
  const double k2 = -std::atan2(H.s[2] * std::sin(k1), H.s[1] + H.s[2] * std::cos(k1));
  return {value, {std::remainder(k1, 2 * kPi), std::remainder(k2, 2 * kPi)}};
}

ThermoSample thermo_sample(double beta, const Couplings& J, const QuadratureSpec& quad) {
  const QuadratureResult f = plane_free_energy(J.scaled(beta), quad);
  const FreeEnergyDerivatives d = free_energy_derivatives(beta, J, quad);
  return {beta, f.value, d.f1, d.f2, std::max(f.error, d.error)};
}

LogFit fit_log(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_log needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    sx += lx;
    sy += y[i];
    sxx += lx * lx;
    sxy += lx * y[i];
  }
  LogFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const double range = *hi - *lo;
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    worst = std::max(worst, std::abs(fit.slope * std::log(x[i]) + fit.intercept - y[i]));
  }
  fit.residual = range > 0 ? worst / range : (worst == 0 ? 0.0 : std::numeric_limits<double>::infinity());
  return fit;
}

LogSingularityFit log_singularity_fit(const Couplings& J, double beta_c,
                                      const std::vector<double>& distances, const QuadratureSpec& quad) {
  if (!(beta_c > 0)) throw std::invalid_argument("log_singularity_fit needs beta_c > 0");
  for (std::size_t i = 0; i < distances.size(); ++i) {
    if (!(distances[i] > 0) || (i > 0 && !(distances[i] < distances[i - 1]))) {
      throw std::invalid_argument("distances must be positive and decreasing");
    }
  }
  std::vector<double> below, above;
  for (double d : distances) {
    below.push_back(free_energy_derivatives(beta_c - d, J, quad).f2);
    above.push_back(free_energy_derivatives(beta_c + d, J, quad).f2);
  }
  LogSingularityFit out;
  out.below = fit_log(distances, below);
  out.above = fit_log(distances, above);
  out.combined.slope = (out.below.slope + out.above.slope) / 2;
  out.combined.intercept = (out.below.intercept + out.above.intercept) / 2;
  out.combined.residual = std::max(out.below.residual, out.above.residual);
  out.consistent_sign = out.below.slope * out.above.slope > 0;
  return out;
}

}  // namespace kwising
