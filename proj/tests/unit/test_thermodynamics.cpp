#include <stdexcept>
#include <vector>
#include <omp.h>

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "generators.hpp"
#include "kwising/critical_point.hpp"
#include "kwising/errors.hpp"
#include "kwising/oracle.hpp"
#include "kwising/thermodynamics.hpp"

using namespace kwising;

namespace {

const double kLog2 = std::log(2.0);
const double kBetaC111 = 0.25 * std::log(3.0);
const double kBetaC110 = std::atanh(std::sqrt(2.0) - 1.0);

double ring_f(int M, double J) {
  return -std::log(std::pow(2.0 * std::cosh(J), M) + std::pow(2.0 * std::sinh(J), M)) / M;
}

double plane_f(double beta, const Couplings& J) {
  return plane_free_energy(J.scaled(beta)).value;
}

}  // namespace

TEST_CASE("g and h at special points") {
  const GHDecomposition c = eval_gh(kBetaC111, MomentumPoint{}, Couplings{1, 1, 1});
  CHECK(std::abs(c.g) < 1e-14);
  CHECK(c.h == 0.0);
  CHECK(std::abs(eval_gh(kBetaC110, MomentumPoint{}, Couplings{1, 1, 0}).g) < 1e-14);

  kwtest::Rng rng(20);
  for (int i = 0; i < 50; ++i) {
    const GHDecomposition d = eval_gh(kwtest::uniform(rng, 0.1, 2.0), MomentumPoint{}, kwtest::couplings(rng));
    CHECK(d.h == 0.0);
    CHECK(d.h1 == 0.0);
    CHECK(d.h2 == 0.0);
  }
}

TEST_CASE("analytic beta-derivatives of g and h match finite differences") {
  kwtest::Rng rng(21);
  const double step = 1e-5;
  for (int i = 0; i < 50; ++i) {
    const Couplings J = kwtest::couplings(rng);
    const MomentumPoint k = kwtest::momentum(rng);
    const double b = kwtest::uniform(rng, 0.2, 1.5);
    const GHDecomposition m = eval_gh(b - step, k, J);
    const GHDecomposition c = eval_gh(b, k, J);
    const GHDecomposition p = eval_gh(b + step, k, J);
    const double scale = 1.0 + std::abs(c.g) + std::abs(c.g1) + std::abs(c.g2);
    CHECK(std::abs((p.g - m.g) / (2 * step) - c.g1) < 1e-6 * scale);
    CHECK(std::abs((p.g - 2 * c.g + m.g) / (step * step) - c.g2) < 1e-3 * scale);
    CHECK(std::abs((p.h - m.h) / (2 * step) - c.h1) < 1e-6 * (1.0 + std::abs(c.h1)));
    CHECK(std::abs((p.h - 2 * c.h + m.h) / (step * step) - c.h2) < 1e-3 * (1.0 + std::abs(c.h2)));
  }
}

TEST_CASE("g + h is nonnegative") {
  kwtest::Rng rng(22);
  for (int i = 0; i < 10000; ++i) {
    const Couplings J = kwtest::couplings(rng);
    const double b = kwtest::uniform(rng, 0.0, 3.0);
    const GHDecomposition d = eval_gh(b, kwtest::momentum(rng), J);
    const double scale = std::max(1.0, std::abs(d.g));
    CHECK(d.g + d.h >= -1e-12 * scale);
  }
}

TEST_CASE("cylinder at zero coupling and on decoupled rings") {
  CHECK(cylinder_free_energy(5, Couplings{}).value == doctest::Approx(-kLog2).epsilon(1e-14));
  CHECK(std::abs(cylinder_free_energy(3, Couplings{0, 1, 0}).value - ring_f(3, 1.0)) < 1e-12);
  CHECK(std::abs(cylinder_free_energy(4, Couplings{0, -0.7, 0}).value - ring_f(4, -0.7)) < 1e-12);
}

TEST_CASE("cylinder formula equals the transfer matrix for even M and unfrustrated odd rings") {
  kwtest::Rng rng(23);
  for (int i = 0; i < 10; ++i) {
    Couplings J = i < 2 ? kwtest::signed_couplings(rng, -1.0) : kwtest::couplings(rng);
    for (int M = 2; M <= 8; ++M) {
      Couplings JM = J;
      if (M % 2 == 1) {
        JM.J2 = std::abs(J.J2);
        JM.J3 = std::copysign(J.J3, J.J1);
      }
      const double formula = cylinder_free_energy(M, JM).value;
      CHECK(std::abs(formula - cylinder_free_energy_tm(M, JM)) < 1e-8);
    }
  }
}

TEST_CASE("on frustrated odd rings the cylinder formula is a lower bound") {
  kwtest::Rng rng(24);
  int strict = 0;
  for (int i = 0; i < 10; ++i) {
    Couplings J = kwtest::couplings(rng);
    if (i % 2 == 0) {
      J.J2 = -std::abs(J.J2);
    } else {
      J.J2 = std::abs(J.J2);
      J.J3 = -std::copysign(J.J3, J.J1);
    }
    for (int M : {3, 5, 7}) {
      const double formula = cylinder_free_energy(M, J).value;
      const double tm = cylinder_free_energy_tm(M, J);
      CHECK(formula <= tm + 1e-10);
      strict += formula < tm - 1e-6 ? 1 : 0;
    }
  }
  CHECK(strict > 0);
}

TEST_CASE("cylinder: closed k1 integral, serial and parallel quadrature agree") {
  kwtest::Rng rng(25);
  for (int i = 0; i < 5; ++i) {
    const Couplings J = kwtest::couplings(rng);
    const int M = kwtest::uniform_int(rng, 2, 40);
    const double a = cylinder_free_energy(M, J).value;
    CHECK(std::abs(a - cylinder_free_energy_serial(M, J).value) < 1e-12);
    CHECK(std::abs(a - cylinder_free_energy_closed(M, J)) < 1e-9);
  }
}

TEST_CASE("plane free energy limits") {
  CHECK(plane_free_energy(Couplings{}).value == doctest::Approx(-kLog2).epsilon(1e-14));
  // A single nonzero coupling leaves independent chains.
  for (double J : {0.3, -1.1, 2.0}) {
    const double chain = -std::log(2.0 * std::cosh(J));
    CHECK(std::abs(plane_free_energy(Couplings{J, 0, 0}).value - chain) < 1e-10);
    CHECK(std::abs(plane_free_energy(Couplings{0, J, 0}).value - chain) < 1e-10);
    CHECK(std::abs(plane_free_energy(Couplings{0, 0, J}).value - chain) < 1e-10);
  }
}

TEST_CASE("plane free energy is symmetric in the three couplings") {
  kwtest::Rng rng(26);
  for (int i = 0; i < 10; ++i) {
    const Couplings J = kwtest::couplings(rng);
    const double f = plane_free_energy(J).value;
    CHECK(std::abs(f - plane_free_energy(Couplings{J.J2, J.J1, J.J3}).value) < 1e-10);
    CHECK(std::abs(f - plane_free_energy(Couplings{J.J3, J.J2, J.J1}).value) < 1e-10);
    CHECK(std::abs(f - plane_free_energy(Couplings{J.J1, J.J3, J.J2}).value) < 1e-10);
  }
}

TEST_CASE("reduced and tensor plane integrals agree away from criticality") {
  kwtest::Rng rng(27);
  for (int i = 0; i < 5; ++i) {
    const Couplings J = kwtest::couplings(rng, -0.5, 0.5);
    CHECK(std::abs(plane_free_energy(J).value - plane_free_energy_grid(J).value) < 1e-9);
  }
}

TEST_CASE("cylinders converge to the plane within 4 max|J| / M") {
  kwtest::Rng rng(28);
  for (int i = 0; i < 5; ++i) {
    const Couplings J = kwtest::couplings(rng);
    const double f = plane_free_energy(J).value;
    for (int M : {8, 16, 32, 64}) {
      CHECK(std::abs(f - cylinder_free_energy(M, J).value) <= 4.0 * J.max_abs() / M + 2e-8);
    }
  }
}

TEST_CASE("free energy is concave in beta") {
  const Couplings J{1, 1, 1};
  std::vector<double> f;
  for (int i = 0; i <= 40; ++i) f.push_back(plane_f(0.05 + 0.0125 * i, J));
  for (std::size_t i = 1; i + 1 < f.size(); ++i) CHECK(f[i + 1] - 2 * f[i] + f[i - 1] <= 1e-6);
}

TEST_CASE("derivatives at zero coupling vanish") {
  const FreeEnergyDerivatives d = free_energy_derivatives(0.7, Couplings{});
  CHECK(d.f1 == 0.0);
  CHECK(d.f2 == 0.0);
}

TEST_CASE("derivatives match centred differences of f") {
  const Couplings J{1, 1, 1};
  const double h = 1e-4;
  const double b = 0.1;
  const FreeEnergyDerivatives d = free_energy_derivatives(b, J);
  CHECK(std::abs((plane_f(b + h, J) - plane_f(b - h, J)) / (2 * h) - d.f1) < 1e-6);

  kwtest::Rng rng(29);
  for (int i = 0; i < 6; ++i) {
    const Couplings K = kwtest::couplings(rng);
    const double beta = kwtest::uniform(rng, 0.1, 0.9);
    if (const auto bc = critical_beta(K); bc && std::abs(beta - *bc) < 0.01) continue;
    const FreeEnergyDerivatives e = free_energy_derivatives(beta, K);
    const double fm = plane_f(beta - h, K), f0 = plane_f(beta, K), fp = plane_f(beta + h, K);
    CHECK(std::abs((fp - fm) / (2 * h) - e.f1) < 1e-5);
    CHECK(std::abs((fp - 2 * f0 + fm) / (h * h) - e.f2) < 1e-5 * std::max(1.0, std::abs(e.f2)) + 1e-3);
  }
}

TEST_CASE("reduced and tensor derivative integrals agree") {
  kwtest::Rng rng(30);
  for (int i = 0; i < 3; ++i) {
    const Couplings J = kwtest::couplings(rng, -0.4, 0.4);
    const FreeEnergyDerivatives a = free_energy_derivatives(1.0, J);
    const FreeEnergyDerivatives b = free_energy_derivatives_grid(1.0, J);
    CHECK(std::abs(a.f1 - b.f1) < 1e-8);
    CHECK(std::abs(a.f2 - b.f2) < 1e-8);
  }
}

TEST_CASE("derivatives refuse the exclusion zone") {
  CHECK_THROWS_AS(free_energy_derivatives(kBetaC111, Couplings{1, 1, 1}), CriticalExclusion);
  CHECK_THROWS_AS(free_energy_derivatives(kBetaC111 + 5e-10, Couplings{1, 1, 1}), CriticalExclusion);
  CHECK_NOTHROW(free_energy_derivatives(kBetaC111 + 1e-3, Couplings{1, 1, 1}));
}

TEST_CASE("minimum gap vanishes only at the critical point") {
  const GapMinimum at = min_gap(kBetaC111, Couplings{1, 1, 1});
  CHECK(std::abs(at.value) < 1e-12);
  CHECK(min_gap(0.2, Couplings{1, 1, 1}).value > 1e-3);
  kwtest::Rng rng(31);
  for (int i = 0; i < 20; ++i) {
    CHECK(min_gap(kwtest::uniform(rng, 0.05, 2.0), kwtest::couplings(rng)).value >= -1e-12);
  }
}

TEST_CASE("log fit recovers synthetic data") {
  const std::vector<double> x = {0.02, 0.01, 0.005, 0.0025};
  std::vector<double> y;
  for (double d : x) y.push_back(-1.7 * std::log(d) + 0.3);
  const LogFit f = fit_log(x, y);
  CHECK(f.slope == doctest::Approx(-1.7).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(f.residual < 1e-12);
}

TEST_CASE("specific heat diverges logarithmically") {
  const std::vector<double> d = {0.02, 0.01, 0.005, 0.0025};
  for (auto [J, bc] : {std::pair{Couplings{1, 1, 1}, kBetaC111}, std::pair{Couplings{1, 1, 0}, kBetaC110}}) {
    const LogSingularityFit fit = log_singularity_fit(J, bc, d);
    CHECK(fit.consistent_sign);
    CHECK(std::abs(fit.below.slope) > 0.01);
    CHECK(std::abs(fit.above.slope) > 0.01);
    CHECK(fit.combined.residual < 0.05);
  }
  CHECK_THROWS(log_singularity_fit(Couplings{1, 1, 1}, kBetaC111, {0.0025, 0.005}));
}

TEST_CASE("quadrature is bitwise independent of the thread count") {
  const Couplings J{0.9, -0.4, 0.7};
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double one = plane_free_energy(J).value;
  const double cyl_one = cylinder_free_energy(24, J).value;
  omp_set_num_threads(4);
  const double four = plane_free_energy(J).value;
  const double cyl_four = cylinder_free_energy(24, J).value;
  omp_set_num_threads(saved);
  CHECK(one == four);
  CHECK(cyl_one == cyl_four);
}
