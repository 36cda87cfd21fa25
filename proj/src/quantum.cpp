#include "kwising/quantum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kwising/errors.hpp"
#include "kwising/lattice.hpp"
#include "kwising/oracle.hpp"
#include "kwising/thermodynamics.hpp"

namespace kwising {

namespace {

constexpr double kPi = std::numbers::pi;

// log sum exp over a list of exponents.
double log_sum_exp(const std::vector<double>& x) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(x.begin(), x.end());
  CompensatedSum acc;
  for (double v : x) acc.add(std::exp(v - m));
  return m + std::log(acc.value());
}

std::uint32_t rotl(std::uint32_t s, int j, int L) {
  const std::uint32_t mask = (L == 32) ? ~0U : ((1U << L) - 1U);
  j %= L;
  if (j == 0) return s;
  return ((s << j) | (s >> (L - j))) & mask;
}

// -1/4 sum sigma_i sigma_{i+1}: each satisfied bond contributes -1/4, each
// broken bond +1/4.
double zz_energy(std::uint32_t s, int L) {
  const int broken = std::popcount((s ^ rotl(s, 1, L)) & ((1U << L) - 1U));
  return 0.25 * (2 * broken - L);
}

void check_chain(int L, int max_L, const char* what) {
  if (L < 2) throw std::invalid_argument(std::string(what) + " needs L >= 2");
  if (L > max_L) throw SizeExceeded(std::string(what) + " limited to L <= " + std::to_string(max_L));
}

}  // namespace

QuantumParams QuantumParams::make(double beta, double h) {
  if (!(beta > 0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be positive");
  if (!std::isfinite(h)) throw std::invalid_argument("h must be finite");
  return {beta, h};
}

double dispersion(double h, double k) noexcept {
  return std::sqrt(std::max(1 + 4 * h * h + 4 * h * std::cos(k), 0.0));
}

double log_cosh(double x) noexcept {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2 * a)) - std::numbers::ln2;
}

QuadratureResult quantum_free_energy(const QuantumParams& p, const QuadratureSpec& quad) {
  if (!(p.beta > 0)) throw std::invalid_argument("quantum_free_energy needs beta > 0");
  QuadratureResult r = integrate_periodic(
      [&](double k) { return log_cosh(p.beta * dispersion(p.h, k) / 4) / (2 * kPi); }, quad);
  r.value = -(std::numbers::ln2 + r.value) / p.beta;
  r.error /= p.beta;
  return r;
}

double exact_diag_free_energy(int L, const QuantumParams& p) {
  check_chain(L, kMaxExactDiagL, "exact_diag_free_energy");
  const std::uint32_t dim = 1U << L;
  const std::uint32_t mask = dim - 1;
  // Orbit data under translations T^j (rotate left by j) and the global flip P:
  // state = T^j P^f rep.
  constexpr std::uint32_t kUnset = ~0U;
  std::vector<std::uint32_t> rep_of(dim, kUnset);
  std::vector<std::uint8_t> shift_of(dim), flip_of(dim);
  std::vector<std::uint32_t> reps;
  std::vector<std::vector<std::pair<int, int>>> stabilizers;
  for (std::uint32_t s = 0; s < dim; ++s) {
    if (rep_of[s] != kUnset) continue;
    const auto r = static_cast<std::uint32_t>(reps.size());
    reps.push_back(s);
    std::vector<std::pair<int, int>> stab;
    for (int f = 0; f < 2; ++f) {
      const std::uint32_t base = f ? (~s & mask) : s;
      for (int j = 0; j < L; ++j) {
        const std::uint32_t t = rotl(base, j, L);
        if (t == s) stab.emplace_back(j, f);
        if (rep_of[t] == kUnset) {
          rep_of[t] = r;
          shift_of[t] = static_cast<std::uint8_t>(j);
          flip_of[t] = static_cast<std::uint8_t>(f);
        }
      }
    }
    stabilizers.push_back(std::move(stab));
  }

  const int sectors = 2 * L;
  std::vector<std::vector<double>> exponents(static_cast<std::size_t>(sectors));
#pragma omp parallel for schedule(dynamic, 1)
  for (int sector = 0; sector < sectors; ++sector) {
    const int m = sector / 2;
    const int parity = sector % 2 == 0 ? 1 : -1;
    const double k = 2 * kPi * m / L;
    auto character = [&](int j, int f) {
      return std::polar(1.0, k * j) * static_cast<double>(f && parity < 0 ? -1 : 1);
    };
    // Representatives compatible with the sector: the character is trivial
    // on the stabilizer.
    std::vector<int> index(reps.size(), -1);
    std::vector<std::uint32_t> basis;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      bool ok = true;
      for (const auto& [j, f] : stabilizers[r]) {
        if (std::abs(character(j, f) - 1.0) > 1e-9) {
          ok = false;
          break;
        }
      }
      if (ok) {
        index[r] = static_cast<int>(basis.size());
        basis.push_back(static_cast<std::uint32_t>(r));
      }
    }
    const auto n = static_cast<Eigen::Index>(basis.size());
    if (n == 0) continue;
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      const std::uint32_t r = basis[static_cast<std::size_t>(a)];
      const std::uint32_t s = reps[r];
      H(a, a) += zz_energy(s, L);
      const double size_r = static_cast<double>(stabilizers[r].size());
      for (int i = 0; i < L; ++i) {
        const std::uint32_t t = s ^ (1U << i);
        const std::uint32_t r2 = rep_of[t];
        const int b = index[r2];
        if (b < 0) continue;
        const double size_r2 = static_cast<double>(stabilizers[r2].size());
        H(b, a) += -0.5 * p.h * character(shift_of[t], flip_of[t]) * std::sqrt(size_r2 / size_r);
      }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    auto& out = exponents[static_cast<std::size_t>(sector)];
    for (Eigen::Index i = 0; i < n; ++i) out.push_back(-p.beta * es.eigenvalues()[i]);
  }
  std::vector<double> all;
  for (const auto& e : exponents) all.insert(all.end(), e.begin(), e.end());
  return -log_sum_exp(all) / (p.beta * L);
}

double exact_diag_free_energy_dense(int L, const QuantumParams& p) {
  check_chain(L, kMaxDenseDiagL, "exact_diag_free_energy_dense");
  const auto dim = static_cast<Eigen::Index>(1U << L);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    H(s, s) = zz_energy(static_cast<std::uint32_t>(s), L);
    for (int i = 0; i < L; ++i) H(s ^ (Eigen::Index{1} << i), s) += -0.5 * p.h;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  std::vector<double> exponents(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) exponents[static_cast<std::size_t>(i)] = -p.beta * es.eigenvalues()[i];
  return -log_sum_exp(exponents) / (p.beta * L);
}

TrotterCouplings trotter_couplings(const QuantumParams& p, int n) {
  if (!(p.h > 0)) throw std::invalid_argument("the Trotter route needs h > 0");
  if (!(n > p.beta * p.h / 2)) throw std::invalid_argument("the Trotter route needs n > beta h / 2");
  return {p.beta / (4.0 * n), -0.5 * std::log(p.beta * p.h / (2.0 * n))};
}

QuadratureResult trotter_free_energy(const QuantumParams& p, int n, const QuadratureSpec& quad) {
  const TrotterCouplings c = trotter_couplings(p, n);
  QuadratureResult r = cylinder_free_energy(n, Couplings{c.J1, c.J2, 0.0}, quad);
  r.value = (-0.5 * n * std::log(p.beta * p.h / (2.0 * n)) + n * r.value) / p.beta;
  r.error *= n / p.beta;
  return r;
}

double trotter_trace_log(int L, int n, const QuantumParams& p) {
  check_chain(L, kMaxDenseDiagL, "trotter_trace_log");
  if (n < 1) throw std::invalid_argument("trotter_trace_log needs n >= 1");
  const double a = p.beta * p.h / (2.0 * n);  // (beta h / n) S^x has off-diagonal beta h / 2n
  if (!(std::abs(a) < 1)) throw std::invalid_argument("trotter_trace_log needs |beta h| < 2n");
  const auto dim = static_cast<Eigen::Index>(1U << L);
  // B = D^1/2 V D^1/2 is symmetric with the spectrum of D V; V = (x)_i [[1, a], [a, 1]].
  Eigen::VectorXd half_d(dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    half_d[s] = std::exp(-0.5 * (p.beta / n) * zz_energy(static_cast<std::uint32_t>(s), L));
  }
  Eigen::MatrixXd B(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    for (Eigen::Index t = 0; t < dim; ++t) {
      B(s, t) = half_d[s] * std::pow(a, std::popcount(static_cast<std::uint32_t>(s ^ t))) * half_d[t];
    }
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
  std::vector<double> logs;
  double negative = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double lambda = es.eigenvalues()[i];
    if (lambda > 0) {
      logs.push_back(n * std::log(lambda));
    } else {
      negative += std::pow(lambda, n);
    }
  }
  const double main = log_sum_exp(logs);
  return main + std::log1p(negative / std::exp(main));
}

double trotter_classical_log(int L, int n, const QuantumParams& p) {
  if (L < 1 || n < 2) throw std::invalid_argument("trotter_classical_log needs L >= 1, n >= 2");
  const TrotterCouplings c = trotter_couplings(p, n);
  const TransferMatrix T = transfer_matrix(n, Couplings{c.J1, c.J2, 0.0});
  return 0.5 * L * n * std::log(p.beta * p.h / (2.0 * n)) + std::log(trace_power(T, L));
}

std::pair<double, double> sum_identity_check(int M, double J2) {
  if (M < 2 || !(J2 > 0)) throw std::invalid_argument("sum_identity_check needs M >= 2 and J2 > 0");
  const double a = 1 / std::tanh(2 * J2);
  CompensatedSum lhs;
  for (int b = 0; b < M; ++b) lhs.add(std::log(a - std::cos(2 * kPi * b / M + kPi / M)));
  const double coth = 1 / std::tanh(J2);
  const double rhs = -M * std::numbers::ln2 + M * std::log(coth) + 2 * std::log1p(std::pow(coth, -M));
  return {lhs.value(), rhs};
}

std::pair<double, double> sum_identity_check_a(int M, double a) {
  if (M < 2 || !(a > 1)) throw std::invalid_argument("sum_identity_check_a needs M >= 2 and a > 1");
  CompensatedSum lhs;
  for (int b = 0; b < M; ++b) lhs.add(std::log(a - std::cos(2 * kPi * b / M + kPi / M)));
  // log(a + sqrt(a^2 - 1)) = acosh(a), computed without forming a^2 - 1.
  const double log_coth = std::log1p((a - 1) + std::sqrt((a - 1) * (a + 1)));
  const double rhs = -M * std::numbers::ln2 + M * log_coth + 2 * std::log1p(std::exp(-M * log_coth));
  return {lhs.value(), rhs};
}

QuadratureResult ground_state_energy(double h, const QuadratureSpec& quad) {
  if (!std::isfinite(h)) throw std::invalid_argument("h must be finite");
  return integrate_periodic([&](double k) { return -dispersion(h, k) / (8 * kPi); }, quad);
}

QuadratureResult gse_second_derivative(double h, const QuadratureSpec& quad) {
  if (!std::isfinite(h)) throw std::invalid_argument("h must be finite");
  if (std::abs(std::abs(h) - 0.5) <= kQuantumExclusion) {
    throw CriticalExclusion("e0'' requested within the exclusion zone of |h| = 1/2");
  }
  return integrate_periodic(
      [&](double k) {
        const double e = dispersion(h, k);
        const double c = 2 * h + std::cos(k);
        return (-1 / e + c * c / (e * e * e)) / (2 * kPi);
      },
      quad);
}

}  // namespace kwising
