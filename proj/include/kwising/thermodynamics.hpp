#pragma once

#include <optional>
#include <vector>

#include "kwising/kacward.hpp"
#include "kwising/lattice.hpp"
#include "kwising/quadrature.hpp"

namespace kwising {

/// g(beta) and h(beta; k) for couplings beta * J, with their beta-derivatives:
///   g = prod cosh(2 beta J_i) + prod sinh(2 beta J_i) - sum sinh(2 beta J_i)
///   h = sum sinh(2 beta J_i) (1 - cos k_i),   k_3 = k_1 + k_2.
/// g + h >= 0 everywhere; h(beta; 0, 0) = 0 exactly.
struct GHDecomposition {
  double g = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  double h = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
};

GHDecomposition eval_gh(double beta, const MomentumPoint& k, const Couplings& J);

/// One row of a beta-sweep. f is the free energy density of the plane at
/// couplings beta * J; f1, f2 are its first and second beta-derivatives.
struct ThermoSample {
  double beta = 0.0;
  double f = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  double quadrature_error = 0.0;  // largest of the three estimates
};

/// Free energy density of the cylinder Z x T_M at couplings J: the k1 integral
/// by doubling midpoint quadrature, the k2 sum over the shifted grid
/// (2 pi / M) T_M + pi / M.
QuadratureResult cylinder_free_energy(int M, const Couplings& J, const QuadratureSpec& quad = {});
QuadratureResult cylinder_free_energy_serial(int M, const Couplings& J,
                                             const QuadratureSpec& quad = {});

/// The cylinder with the k1 integral done in closed form, for cross-checks:
/// int log(A - R cos(k + phi)) dk = 2 pi log((A + sqrt(A^2 - R^2)) / 2).
double cylinder_free_energy_closed(int M, const Couplings& J);

/// Free energy density of the plane at couplings J. The inner k2 integral is
/// done in closed form and the remaining k1 integral by doubling midpoint
/// quadrature; the integrand is then at worst |k1|-like at criticality.
QuadratureResult plane_free_energy(const Couplings& J, const QuadratureSpec& quad = {});

/// Plane free energy from the tensor midpoint rule on [-pi, pi]^2. Grids of
/// n x n nodes; only usable away from criticality.
QuadratureResult plane_free_energy_grid(const Couplings& J, const QuadratureSpec& quad = {});

struct FreeEnergyDerivatives {
  double f1 = 0.0;
  double f2 = 0.0;
  double error = 0.0;
};

/// f'(beta), f''(beta) of the plane at couplings beta * J from the
/// differentiated integrals. Throws CriticalExclusion within
/// kCriticalExclusion of a critical point.
FreeEnergyDerivatives free_energy_derivatives(double beta, const Couplings& J,
                                              const QuadratureSpec& quad = {});

/// Same integrals over [-pi, pi]^2 with the tensor midpoint rule.
FreeEnergyDerivatives free_energy_derivatives_grid(double beta, const Couplings& J,
                                                   const QuadratureSpec& quad = {});

inline constexpr double kCriticalExclusion = 1e-9;

/// min over k of g + h at couplings beta * J, with its argmin.
struct GapMinimum {
  double value = 0.0;
  MomentumPoint argmin;
};

GapMinimum min_gap(double beta, const Couplings& J);

ThermoSample thermo_sample(double beta, const Couplings& J, const QuadratureSpec& quad = {});

struct LogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max |fit - data| / (max - min of data)
};

/// f''(beta_c -+ d) = A log d + B, fitted on each side separately.
struct LogSingularityFit {
  LogFit below;
  LogFit above;
  /// Mean slope, mean intercept and worst residual of the two sides.
  LogFit combined;
  bool consistent_sign = false;
};

/// Least-squares fit of y against log x.
LogFit fit_log(const std::vector<double>& x, const std::vector<double>& y);

LogSingularityFit log_singularity_fit(const Couplings& J, double beta_c,
                                      const std::vector<double>& distances,
                                      const QuadratureSpec& quad = {});

}  // namespace kwising
