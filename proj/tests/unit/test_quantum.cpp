#include <stdexcept>
#include <vector>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "generators.hpp"
#include "kwising/errors.hpp"
#include "kwising/quantum.hpp"
#include "kwising/thermodynamics.hpp"

using namespace kwising;

namespace {

const double kPi = std::numbers::pi;

double f_qu(double beta, double h) {
  return quantum_free_energy(QuantumParams::make(beta, h)).value;
}

double free_chain(double beta) { return -std::log(2.0 * std::cosh(beta / 4.0)) / beta; }

}  // namespace

TEST_CASE("parameters are validated") {
  CHECK_THROWS_AS(QuantumParams::make(0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(QuantumParams::make(1.0, std::nan("")), std::invalid_argument);
  CHECK_THROWS(trotter_couplings(QuantumParams::make(1.0, 0.0), 8));
  CHECK_THROWS(trotter_couplings(QuantumParams::make(40.0, 1.0), 10));
}

TEST_CASE("dispersion and log cosh") {
  kwtest::Rng rng(50);
  for (int i = 0; i < 1000; ++i) {
    const double h = kwtest::uniform(rng, -3.0, 3.0);
    const double k = kwtest::uniform(rng, -kPi, kPi);
    const double e = dispersion(h, k);
    CHECK(std::abs(e * e - (1 + 4 * h * h + 4 * h * std::cos(k))) < 1e-12 * (1 + 4 * h * h));
    CHECK(e >= std::abs(1 - 2 * std::abs(h)) - 1e-15);
  }
  CHECK(log_cosh(1e4) == doctest::Approx(1e4 - std::log(2.0)).epsilon(1e-15));
  CHECK(log_cosh(-1e4) == doctest::Approx(1e4 - std::log(2.0)).epsilon(1e-15));
  CHECK(log_cosh(0.3) == doctest::Approx(std::log(std::cosh(0.3))).epsilon(1e-15));
}

TEST_CASE("zero field reduces to free spins with coupling 1/4") {
  for (double beta : {0.5, 2.0, 10.0}) CHECK(std::abs(f_qu(beta, 0.0) - free_chain(beta)) < 1e-10);
}

TEST_CASE("free energy is even in h") {
  kwtest::Rng rng(51);
  for (int i = 0; i < 20; ++i) {
    const double beta = kwtest::uniform(rng, 0.1, 20.0);
    const double h = kwtest::uniform(rng, 0.0, 2.0);
    CHECK(std::abs(f_qu(beta, h) - f_qu(beta, -h)) < 1e-12);
  }
}

TEST_CASE("log-partition density is nondecreasing in beta") {
  for (double h : {0.2, 0.5, 1.3}) {
    double prev = -0.1 * f_qu(0.1, h);
    for (int i = 2; i <= 60; ++i) {
      const double beta = 0.1 * i;
      const double cur = -beta * f_qu(beta, h);
      CHECK(cur >= prev - 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("low temperature tracks the ground state energy") {
  for (double h : {0.0, 0.3, 1.0}) {
    CHECK(std::abs(f_qu(200.0, h) - ground_state_energy(h).value) < 1e-3);
  }
}

TEST_CASE("exact diagonalization at zero field") {
  const double beta = 1.7;
  const QuantumParams p = QuantumParams::make(beta, 0.0);
  const double Z2 = 2 * std::exp(beta / 2) + 2 * std::exp(-beta / 2);
  CHECK(std::abs(exact_diag_free_energy(2, p) + std::log(Z2) / (2 * beta)) < 1e-13);
  const int L = 8;
  const double ring = free_chain(beta) - std::log1p(std::pow(std::tanh(beta / 4), L)) / (beta * L);
  CHECK(std::abs(exact_diag_free_energy(L, p) - ring) < 1e-13);
  CHECK(std::abs(exact_diag_free_energy_dense(L, p) - ring) < 1e-13);
}

TEST_CASE("symmetry sectors agree with the dense Hamiltonian") {
  kwtest::Rng rng(52);
  for (int i = 0; i < 6; ++i) {
    const int L = kwtest::uniform_int(rng, 2, 9);
    const QuantumParams p = QuantumParams::make(kwtest::uniform(rng, 0.2, 5.0), kwtest::uniform(rng, -1.0, 1.0));
    CHECK(std::abs(exact_diag_free_energy(L, p) - exact_diag_free_energy_dense(L, p)) < 1e-12);
  }
  CHECK_THROWS_AS(exact_diag_free_energy(kMaxExactDiagL + 1, QuantumParams::make(1, 0)), SizeExceeded);
  CHECK_THROWS_AS(exact_diag_free_energy_dense(kMaxDenseDiagL + 1, QuantumParams::make(1, 0)), SizeExceeded);
}

TEST_CASE("exact diagonalization at L = 14 against the infinite chain") {
  const QuantumParams p = QuantumParams::make(2.0, 0.3);
  const double ed = exact_diag_free_energy(14, p);
  // Pinned after the first run that agreed with the infinite-chain formula.
  CHECK(ed == doctest::Approx(-0.4256935890302434).epsilon(1e-12));
  CHECK(std::abs(ed - quantum_free_energy(p).value) < 1e-4);
}

TEST_CASE("Trotter route converges as 1/n") {
  const QuantumParams p = QuantumParams::make(2.0, 0.5);
  const double exact = quantum_free_energy(p).value;
  const double e16 = std::abs(trotter_free_energy(p, 16).value - exact);
  const double e32 = std::abs(trotter_free_energy(p, 32).value - exact);
  const double e64 = std::abs(trotter_free_energy(p, 64).value - exact);
  CHECK(e16 / e32 >= 1.6);
  CHECK(e16 / e32 <= 2.4);
  CHECK(e32 / e64 >= 1.6);
  CHECK(e32 / e64 <= 2.4);

  const QuantumParams q = QuantumParams::make(1.0, 0.3);
  CHECK(std::abs(trotter_free_energy(q, 128).value - quantum_free_energy(q).value) < 5e-3);
}

TEST_CASE("Trotter product trace equals the classical torus") {
  kwtest::Rng rng(53);
  for (int i = 0; i < 5; ++i) {
    const QuantumParams p = QuantumParams::make(kwtest::uniform(rng, 0.3, 3.0), kwtest::uniform(rng, 0.05, 1.0));
    const int L = kwtest::uniform_int(rng, 3, 6);
    const int n = kwtest::uniform_int(rng, 3, 6);
    CHECK(std::abs(trotter_trace_log(L, n, p) - trotter_classical_log(L, n, p)) < 1e-11);
  }
}

TEST_CASE("finite chains sandwich the infinite Trotter cylinder") {
  const QuantumParams p = QuantumParams::make(1.0, 0.5);
  for (int n = 2; n <= 6; ++n) {
    const double infinite = trotter_free_energy(p, n).value;
    for (int L = 3; L <= 10; ++L) {
      const double finite = -trotter_trace_log(L, n, p) / (p.beta * L);
      CHECK(std::abs(finite - infinite) <= 1.0 / (2.0 * L * p.beta));
    }
  }
}

TEST_CASE("2d-to-1d sum identity") {
  const auto [l1, r1] = sum_identity_check(4, 0.7);
  CHECK(std::abs(l1 - r1) < 1e-12);
  const auto [l2, r2] = sum_identity_check_a(2, 2.0);
  CHECK(std::abs(l2 - r2) < 1e-12);
  const auto [l3, r3] = sum_identity_check_a(6, 1.0 + 1e-8);
  CHECK(kwtest::rel(l3, r3) < 1e-6);
  kwtest::Rng rng(54);
  for (int i = 0; i < 20; ++i) {
    const auto [l, r] = sum_identity_check(kwtest::uniform_int(rng, 2, 64), kwtest::uniform(rng, 0.05, 3.0));
    CHECK(std::abs(l - r) < 1e-12 * std::max(1.0, std::abs(l)));
  }
}

TEST_CASE("ground state energy") {
  CHECK(std::abs(ground_state_energy(0.0).value + 0.25) < 1e-9);
  CHECK(std::abs(ground_state_energy(0.5).value + 1.0 / kPi) < 1e-9);
  CHECK(std::abs(ground_state_energy(-0.5).value + 1.0 / kPi) < 1e-9);
  // Deep in the paramagnet e0 ~ -h/2 - 1/(32 h).
  CHECK(std::abs(ground_state_energy(50.0).value - (-25.0 - 1.0 / 1600.0)) < 1e-5);
}

TEST_CASE("second derivative of e0 against finite differences") {
  for (double h : {0.1, 0.3, 0.8, 1.5}) {
    const double s = 1e-4;
    const double fd = (ground_state_energy(h + s).value - 2 * ground_state_energy(h).value +
                       ground_state_energy(h - s).value) / (s * s);
    CHECK(std::abs(fd - gse_second_derivative(h).value) < 1e-4);
  }
  CHECK_THROWS_AS(gse_second_derivative(0.5), CriticalExclusion);
  CHECK_THROWS_AS(gse_second_derivative(-0.5 + 1e-10), CriticalExclusion);
}

TEST_CASE("e0'' diverges like (1/pi) log|h - 1/2|") {
  const std::vector<double> d = {1e-2, 1e-3, 1e-4};
  std::vector<double> below, above;
  for (double x : d) {
    below.push_back(gse_second_derivative(0.5 - x).value);
    above.push_back(gse_second_derivative(0.5 + x).value);
  }
  for (const LogFit& fit : {fit_log(d, below), fit_log(d, above)}) {
    CHECK(std::abs(fit.slope - 1.0 / kPi) < 0.15 / kPi);
  }
}
