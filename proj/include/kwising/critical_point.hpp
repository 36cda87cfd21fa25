#pragma once

#include <optional>
#include <vector>

#include "kwising/kacward.hpp"
#include "kwising/lattice.hpp"

namespace kwising {

/// a(beta) for couplings (J12, J12, J3), t = tanh(beta J12), tau = tanh(beta J3):
///   1 + t^2 tau - 2t - tau - t^2 - 2 t tau.
/// For J12 = 1, g(beta) = cosh^2(2 beta) cosh(2 beta J3) a(beta)^2.
double a_of_beta(double beta, double J3, double J12 = 1.0);

/// d a / d beta for J12 = 1.
double a_prime(double beta, double J3);

/// a'(beta_c) = -4 (1 - t^2)(1 + t^2 + 2 t J3) / (1 + 2t - t^2), valid only at
/// the root of a, t = tanh beta_c.
double a_prime_at_root(double t, double J3);

/// j(t) = artanh((1 - 2t - t^2) / (1 + 2t - t^2)) / artanh t on (0, 1); strictly
/// decreasing from +inf to -1.
double j_of_t(double t);

enum class CriticalMethod { CdclInversion, GapScan };

struct SingularityHypotheses {
  double g2 = 0.0;                 // g''(beta_c), analytic
  double c = 0.0;                  // min over the grid of h / (k1^2 + k2^2)
  bool sufficient_condition = false;  // sinh(2 beta_c J_i) + 2 sinh(2 beta_c J3) > 0, i = 1, 2
  double a_prime = 0.0;            // a'(beta_c); NaN unless J1 = J2 = 1
  double a_prime_closed = 0.0;     // closed form at the root; NaN unless J1 = J2 = 1
};

struct CriticalResult {
  std::optional<double> beta_c;
  CriticalMethod method = CriticalMethod::CdclInversion;
  MomentumPoint gap_min_location;
  std::optional<SingularityHypotheses> hypotheses;
};

/// Critical inverse temperature for J1 = J2 = 1: artanh(j^{-1}(J3)) for J3 > -1,
/// solved as sinh(2 beta) = exp(-2 beta J3), the same equation in beta;
/// absent for J3 <= -1.
CriticalResult beta_c_from_J3(double J3);

/// The root alone, without the hypothesis checks.
std::optional<double> solve_beta_c(double J3);

/// Critical inverse temperature when it is known in closed form: J1 = J2 != 0,
/// by the scaling beta J and the sublattice spin flip (J1, J2) -> (-J1, -J2).
std::optional<double> critical_beta(const Couplings& J);

struct HMinimum {
  double value = 0.0;
  MomentumPoint argmin;
};

/// min over k of h(beta; k). Closed form for J1 = J2 > 0, grid scan otherwise.
HMinimum min_h(double beta, const Couplings& J);

/// 512^2 midpoint scan followed by exact coordinate descent.
HMinimum min_h_grid(double beta, const Couplings& J);

inline constexpr int kHypothesisGrid = 512;

SingularityHypotheses singularity_hypotheses(const Couplings& J, double beta_c);

struct PhaseRow {
  double J3 = 0.0;
  std::optional<double> beta_c;
  std::optional<SingularityHypotheses> hypotheses;
};

/// Separation line of the J1 = J2 = 1 phase diagram, rows in input order.
std::vector<PhaseRow> phase_diagram_sweep(const std::vector<double>& J3_values);

/// Exploratory criticality for general couplings: scans beta in [lo, hi] for a
/// zero of min_k (g + h). The location is reported without any claim about
/// the nature of the singularity.
CriticalResult gap_scan(const Couplings& J, double beta_lo, double beta_hi, int steps = 2000);

}  // namespace kwising
