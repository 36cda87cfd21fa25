#include "kwising/verify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <numbers>
#include <sstream>

#include "kwising/critical_point.hpp"
#include "kwising/kacward.hpp"
#include "kwising/oracle.hpp"
#include "kwising/quantum.hpp"
#include "kwising/thermodynamics.hpp"

namespace kwising {

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

double relative_difference(double a, double b) noexcept {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0 ? 0.0 : std::abs(a - b) / scale;
}

Couplings random_couplings(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  const double a = u(rng);
  const double b = u(rng);
  const double c = u(rng);
  return {a, b, c};
}

std::vector<Couplings> coupling_draws(std::mt19937_64& rng, int count) {
  std::vector<Couplings> out;
  for (int i = 0; i < count; ++i) {
    Couplings J = random_couplings(rng);
    if (i < 2) J = {-std::abs(J.J1), -std::abs(J.J2), -std::abs(J.J3)};
    out.push_back(J);
  }
  return out;
}

namespace {

std::string describe(const Couplings& J) {
  std::ostringstream os;
  os.precision(6);
  os << "J=(" << J.J1 << "," << J.J2 << "," << J.J3 << ")";
  return os.str();
}

// Runs body, turning exceptions into a failed check.
VerifyCheck guarded(const std::string& name, double tolerance, const std::function<void(VerifyCheck&)>& body) {
  VerifyCheck c{name, false, 0.0, tolerance, ""};
  try {
    body(c);
    c.passed = c.passed && std::isfinite(c.measured);
  } catch (const std::exception& e) {
    c.passed = false;
    c.detail = std::string("exception: ") + e.what();
  }
  return c;
}

// Same magnitudes with J2 >= 0 and J1 J3 >= 0: no odd ring is frustrated.
Couplings unfrustrated(Couplings J) {
  J.J2 = std::abs(J.J2);
  J.J3 = std::copysign(J.J3, J.J1);
  return J;
}

// Worst deviation with the coupling that produced it.
struct Worst {
  double value = 0.0;
  std::string where;
  void update(double v, const std::string& w) {
    if (!(v <= value)) {
      value = v;
      where = w;
    }
  }
};

}  // namespace

VerifyReport run_verify(std::uint64_t seed, const QuadratureSpec& quad) {
  VerifyReport report;
  report.seed = seed;
  std::mt19937_64 rng(seed);
  auto& checks = report.checks;

  const TorusSpec torus3(3, 3);
  const std::vector<Couplings> draws = coupling_draws(rng, 20);

  checks.push_back(guarded("kac-ward identity on 3x3", 1e-10, [&](VerifyCheck& c) {
    Worst w;
    for (const Couplings& J : draws) {
      const EvenSubgraphSums e = even_subgraph_sums(torus3, J);
      const KacWardPair p = kacward_signed_pair(torus3, J);
      w.update(std::max(relative_difference(p.sqrt1, e.signed1), relative_difference(p.sqrt2, e.signed2)),
               describe(J));
    }
    c.measured = w.value;
    c.passed = w.value <= c.tolerance;
    c.detail = "20 draws, worst at " + w.where;
  }));

  checks.push_back(guarded("determinants real and nonnegative on 3x3", 1e-10, [&](VerifyCheck& c) {
    Worst w;
    for (const Couplings& J : draws) {
      const EvenSubgraphSums e = even_subgraph_sums(torus3, J);
      const KacWardPair p = kacward_partition_pair(torus3, J);
      w.update(std::max(relative_difference(p.sqrt1, std::abs(e.signed1)),
                        relative_difference(p.sqrt2, std::abs(e.signed2))),
               describe(J));
    }
    c.measured = w.value;
    c.passed = w.value <= c.tolerance;
    c.detail = "nonnegative roots equal |signed sums|, worst at " + w.where;
  }));

  checks.push_back(guarded("sum of the two square roots on 3x3", 1e-10, [&](VerifyCheck& c) {
    Worst w;
    for (const Couplings& J : draws) {
      const EvenSubgraphSums e = even_subgraph_sums(torus3, J);
      const KacWardPair p = kacward_signed_pair(torus3, J);
      w.update(relative_difference(p.sqrt1 + p.sqrt2, 2 * (e.Ztilde - e.odd_h)), describe(J));
    }
    c.measured = w.value;
    c.passed = w.value <= c.tolerance;
    c.detail = "20 draws, worst at " + w.where;
  }));

  checks.push_back(guarded("high-temperature expansion against brute force on 3x3", 1e-12, [&](VerifyCheck& c) {
    Worst w;
    for (const Couplings& J : draws) {
      const double Z = brute_force_Z(torus3, J);
      const double Zt = even_subgraph_sums(torus3, J).Ztilde;
      w.update(relative_difference(Z, high_temperature_prefactor(torus3, J) * Zt), describe(J));
    }
    c.measured = w.value;
    c.passed = w.value <= c.tolerance;
    c.detail = "20 draws, worst at " + w.where;
  }));

  checks.push_back(guarded("translation invariance and Fourier product, L,M in {2,3,4}", 1e-9, [&](VerifyCheck& c) {
    Worst w;
    for (int L = 2; L <= 4; ++L) {
      for (int M = 2; M <= 4; ++M) {
        const TorusSpec spec(L, M);
        for (const Couplings& J : draws) {
          const ComplexVector W = assemble_W(spec, J).cast<Complex>();
          for (auto v : {ProjectionVariant::G1, ProjectionVariant::G2}) {
            const Determinant direct = det_one_minus(times_diagonal(assemble_K(spec, v), W));
            const Determinant tilde =
                det_one_minus(times_diagonal(assemble_K_tilde(spec), assemble_W_tilde(spec, J, v)));
            const double product = product_formula_log_det(spec, J, v);
            const double dev = std::max({std::abs(std::expm1(direct.log_abs - tilde.log_abs)),
                                         std::abs(std::expm1(direct.log_abs - product)),
                                         std::abs(std::sin(direct.phase)), std::abs(std::sin(tilde.phase))});
            std::ostringstream where;
            where << L << "x" << M << " G" << static_cast<int>(v) << " " << describe(J);
            w.update(dev, where.str());
          }
        }
      }
    }
    c.measured = w.value;
    c.passed = w.value <= c.tolerance;
    c.detail = "9 tori x 20 draws x 2 projections, worst at " + w.where;
  }));

  // The cylinder formula is exact for even M, and for odd M when the ring is
  // not frustrated: J2 >= 0 and J1 J3 >= 0 (a NE step then a W step is a
  // vertical step of sign J1 J3). Otherwise it bounds the free energy from below.
  std::vector<Couplings> cylinder_draws;
  for (int i = 0; i < 10; ++i) cylinder_draws.push_back(random_couplings(rng));
  checks.push_back(guarded("cylinder formula against transfer matrix, M = 2..8", 1e-8, [&](VerifyCheck& c) {
    Worst w;
    for (int M = 2; M <= 8; ++M) {
      for (Couplings J : cylinder_draws) {
        if (M % 2 == 1) J = unfrustrated(J);
        const double formula = cylinder_free_energy(M, J, quad).value;
        const double tm = cylinder_free_energy_tm(M, J);
        w.update(std::abs(formula - tm), "M=" + std::to_string(M) + " " + describe(J));
      }
    }
    c.measured = w.value;
    c.passed = w.value <= c.tolerance;
    c.detail = "10 draws; odd M uses J2 >= 0, J1 J3 >= 0 (unfrustrated ring), worst at " + w.where;
  }));

  checks.push_back(guarded("cylinder formula bounds frustrated odd rings from below", 1e-8, [&](VerifyCheck& c) {
    double worst_excess = -1e300;
    for (int M = 3; M <= 7; M += 2) {
      for (Couplings J : cylinder_draws) {
        J.J2 = -std::abs(J.J2);
        const double formula = cylinder_free_energy(M, J, quad).value;
        worst_excess = std::max(worst_excess, formula - cylinder_free_energy_tm(M, J));
      }
    }
    c.measured = std::max(worst_excess, 0.0);
    c.passed = worst_excess <= c.tolerance;
    c.detail = "formula - transfer matrix <= tol for J2 < 0, M in {3,5,7}";
  }));

  checks.push_back(guarded("cylinder to plane convergence, M in {8,16,32,64}", 0.0, [&](VerifyCheck& c) {
    double worst_ratio = 0.0;
    for (int i = 0; i < 5; ++i) {
      const Couplings J = random_couplings(rng);
      const double plane = plane_free_energy(J, quad).value;
      for (int M : {8, 16, 32, 64}) {
        const double bound = 4 * J.max_abs() / M + 2e-8;
        worst_ratio = std::max(worst_ratio, std::abs(plane - cylinder_free_energy(M, J, quad).value) / bound);
      }
    }
    c.measured = worst_ratio;
    c.tolerance = 1.0;
    c.passed = worst_ratio <= 1.0;
    c.detail = "|f - f_M| / (4 max|J| / M + 2e-8), 5 draws";
  }));

  checks.push_back(guarded("critical points", 1e-10, [&](VerifyCheck& c) {
    const double b1 = solve_beta_c(1.0).value_or(-1);
    const double b0 = solve_beta_c(0.0).value_or(-1);
    const double dev = std::max(std::abs(b1 - 0.25 * std::log(3.0)), std::abs(b0 - std::atanh(std::sqrt(2.0) - 1)));
    const bool absent = !solve_beta_c(-1.0) && !solve_beta_c(-1.5);
    c.measured = dev;
    c.passed = dev <= c.tolerance && absent;
    c.detail = absent ? "beta_c(1), beta_c(0); absent for J3 <= -1" : "beta_c present for J3 <= -1";
  }));

  checks.push_back(guarded("g = cosh^4(b) cosh^2(b J3) a^2", 1e-12, [&](VerifyCheck& c) {
    std::uniform_real_distribution<double> ub(0.01, 2.0), uj(-3.0, 3.0);
    Worst w;
    for (int i = 0; i < 1000; ++i) {
      const double beta = ub(rng);
      const double J3 = uj(rng);
      const double g = eval_gh(beta, {0.0, 0.0}, Couplings{1.0, 1.0, J3}).g;
      const double a = a_of_beta(beta, J3);
      const double rhs = std::pow(std::cosh(beta), 4) * std::pow(std::cosh(beta * J3), 2) * a * a;
      // g is a difference of O(cosh^3) terms; measure against that scale.
      const double scale = std::cosh(2 * beta) * std::cosh(2 * beta) * std::cosh(2 * beta * J3);
      w.update(std::abs(g - rhs) / scale, "beta=" + std::to_string(beta) + " J3=" + std::to_string(J3));
    }
    c.measured = w.value;
    c.passed = w.value <= c.tolerance;
    c.detail = "1000 points, relative to cosh^2(2b) cosh(2b J3), worst at " + w.where;
  }));

  checks.push_back(guarded("g + h >= 0", 1e-12, [&](VerifyCheck& c) {
    std::uniform_real_distribution<double> ub(0.01, 3.0), uk(-std::numbers::pi, std::numbers::pi);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double beta = ub(rng);
      const Couplings J = random_couplings(rng);
      const MomentumPoint k{uk(rng), uk(rng)};
      const GHDecomposition gh = eval_gh(beta, k, J);
      worst = std::max(worst, -(gh.g + gh.h) / std::max(1.0, std::abs(gh.g)));
    }
    c.measured = worst;
    c.passed = worst <= c.tolerance;
    c.detail = "10^4 samples, largest negative part relative to max(1, |g|)";
  }));

  checks.push_back(guarded("specific heat log singularity, J = (1,1,1)", 0.05, [&](VerifyCheck& c) {
    const LogSingularityFit fit =
        log_singularity_fit(Couplings{1.0, 1.0, 1.0}, 0.25 * std::log(3.0), {0.02, 0.01, 0.005, 0.0025}, quad);
    c.measured = fit.combined.residual;
    c.passed = fit.consistent_sign && std::abs(fit.below.slope) > 0.01 && std::abs(fit.above.slope) > 0.01 &&
               fit.combined.residual < c.tolerance;
    std::ostringstream os;
    os << "slopes " << fit.below.slope << " (below), " << fit.above.slope << " (above)";
    c.detail = os.str();
  }));

  checks.push_back(guarded("quantum free energy at h = 0", 1e-10, [&](VerifyCheck& c) {
    double worst = 0.0;
    for (double beta : {0.5, 2.0, 10.0}) {
      const double exact = -std::log(2 * std::cosh(beta / 4)) / beta;
      worst = std::max(worst, std::abs(quantum_free_energy({beta, 0.0}, quad).value - exact));
    }
    c.measured = worst;
    c.passed = worst <= c.tolerance;
    c.detail = "beta in {0.5, 2, 10}";
  }));

  checks.push_back(guarded("quantum free energy against exact diagonalization, L = 14", 1e-4, [&](VerifyCheck& c) {
    const QuantumParams p{2.0, 0.3};
    c.measured = std::abs(quantum_free_energy(p, quad).value - exact_diag_free_energy(14, p));
    c.passed = c.measured <= c.tolerance;
    c.detail = "beta = 2, h = 0.3";
  }));

  checks.push_back(guarded("Trotter route converges as 1/n", 0.0, [&](VerifyCheck& c) {
    const QuantumParams p{2.0, 0.5};
    const double exact = quantum_free_energy(p, quad).value;
    const double e16 = trotter_free_energy(p, 16, quad).value - exact;
    const double e32 = trotter_free_energy(p, 32, quad).value - exact;
    const double e64 = trotter_free_energy(p, 64, quad).value - exact;
    const double r1 = e16 / e32;
    const double r2 = e32 / e64;
    c.measured = std::max(std::abs(r1 - 2), std::abs(r2 - 2));
    c.tolerance = 0.4;
    c.passed = r1 >= 1.6 && r1 <= 2.4 && r2 >= 1.6 && r2 <= 2.4;
    std::ostringstream os;
    os << "err(16)/err(32) = " << r1 << ", err(32)/err(64) = " << r2;
    c.detail = os.str();
  }));

  checks.push_back(guarded("Trotter product trace against classical torus, L = n = 3", 1e-12, [&](VerifyCheck& c) {
    std::uniform_real_distribution<double> ub(0.2, 3.0), uh(0.05, 1.5);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      const QuantumParams p{ub(rng), uh(rng)};
      const double a = trotter_trace_log(3, 3, p);
      const double b = trotter_classical_log(3, 3, p);
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
    c.measured = worst;
    c.passed = worst <= c.tolerance;
    c.detail = "5 draws, difference of log traces";
  }));

  checks.push_back(guarded("2d-to-1d sum identity", 1e-12, [&](VerifyCheck& c) {
    std::uniform_int_distribution<int> um(2, 32);
    std::uniform_real_distribution<double> uj(0.05, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const auto [lhs, rhs] = sum_identity_check(um(rng), uj(rng));
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
    c.measured = worst;
    c.passed = worst <= c.tolerance;
    c.detail = "20 (M, J2) pairs";
  }));

  checks.push_back(guarded("ground state energy closed forms", 1e-9, [&](VerifyCheck& c) {
    const double e0 = ground_state_energy(0.0, quad).value;
    const double ehalf = ground_state_energy(0.5, quad).value;
    c.measured = std::max(std::abs(e0 + 0.25), std::abs(ehalf + 1 / std::numbers::pi));
    c.passed = c.measured <= c.tolerance;
    c.detail = "e0(0) = -1/4, e0(1/2) = -1/pi";
  }));

  return report;
}

}  // namespace kwising
