#pragma once

#include <utility>

#include "kwising/quadrature.hpp"

namespace kwising {

/// Transverse-field chain H = -sum S^z_i S^z_{i+1} - h sum S^x_i with S = sigma / 2.
struct QuantumParams {
  double beta = 1.0;
  double h = 0.0;

  /// Throws std::invalid_argument unless beta > 0 and h is finite.
  static QuantumParams make(double beta, double h);
};

/// epsilon(h, k) = sqrt(1 + 4h^2 + 4h cos k) >= |1 - 2|h||.
double dispersion(double h, double k) noexcept;

/// log cosh without overflow.
double log_cosh(double x) noexcept;

/// -(1/beta) log 2 - (1 / 2 pi beta) int log cosh(beta epsilon(h, k) / 4) dk.
QuadratureResult quantum_free_energy(const QuantumParams& p, const QuadratureSpec& quad = {});

inline constexpr int kMaxExactDiagL = 14;
inline constexpr int kMaxDenseDiagL = 10;

/// -(1 / beta L) log Tr e^{-beta H_L} on the periodic chain, 2 <= L <= 14, by
/// diagonalizing each (momentum, spin-flip parity) sector separately.
double exact_diag_free_energy(int L, const QuantumParams& p);

/// The same from one dense 2^L x 2^L diagonalization, 2 <= L <= 10.
double exact_diag_free_energy_dense(int L, const QuantumParams& p);

/// beta J1 = beta / 4n along the chain, J2 = -1/2 log(beta h / 2n) along the n
/// Trotter slices. Requires h > 0 and n > beta h / 2.
struct TrotterCouplings {
  double J1 = 0.0;
  double J2 = 0.0;
};

TrotterCouplings trotter_couplings(const QuantumParams& p, int n);

/// [-(n/2) log(beta h / 2n) + n f_n(J1, J2, 0)] / beta with f_n the free energy
/// density of the classical cylinder with M = n.
QuadratureResult trotter_free_energy(const QuantumParams& p, int n, const QuadratureSpec& quad = {});

/// log Tr[(D V)^n] on the periodic chain of length L, with
/// D = exp((beta / n) sum S^z_i S^z_{i+1}) and V = prod_i (1 + (beta h / n) S^x_i).
/// Dense; 2 <= L <= 10.
double trotter_trace_log(int L, int n, const QuantumParams& p);

/// (L n / 2) log(beta h / 2n) + log Z_{L,n}(J1, J2, 0) on the L x n torus,
/// from the classical transfer matrix. Equals trotter_trace_log exactly.
double trotter_classical_log(int L, int n, const QuantumParams& p);

/// Sum over the shifted grid of log[coth(2 J2) - cos k] and its closed form
/// -M log 2 + M log coth J2 + 2 log(1 + coth(J2)^-M).
std::pair<double, double> sum_identity_check(int M, double J2);

/// The same identity in the variable a = coth(2 J2) > 1, with
/// coth J2 = a + sqrt(a^2 - 1).
std::pair<double, double> sum_identity_check_a(int M, double a);

/// e0(h) = -(1 / 8 pi) int epsilon(h, k) dk.
QuadratureResult ground_state_energy(double h, const QuadratureSpec& quad = {});

inline constexpr double kQuantumExclusion = 1e-9;

/// e0''(h) = -(1/2pi) int dk / epsilon + (1/2pi) int (2h + cos k)^2 / epsilon^3 dk.
/// Throws CriticalExclusion within kQuantumExclusion of |h| = 1/2.
QuadratureResult gse_second_derivative(double h, const QuadratureSpec& quad = {});

}  // namespace kwising
