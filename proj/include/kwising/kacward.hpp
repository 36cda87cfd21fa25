#pragma once

#include <complex>

#include <Eigen/Dense>

#include "kwising/lattice.hpp"
#include "kwising/projection.hpp"

namespace kwising {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Block6 = Eigen::Matrix<Complex, 6, 6>;

/// Local phase block: entry (a, b) = exp(i turning_angle(a, b) / 2), zero on
/// backtracking pairs. Rows and columns follow Direction order.
Block6 local_phase_block();

/// Kac-Ward matrix on projection `variant`, indexed by flat directed edges:
/// K(e, f) = 1{e -> f} exp(i/2 [turning_angle(e, f) + integrated_angle(e)]).
ComplexMatrix assemble_K(const TorusSpec& spec, ProjectionVariant variant);

/// Translation-invariant matrix: the handle windings dropped.
ComplexMatrix assemble_K_tilde(const TorusSpec& spec);

/// Diagonal of W: tanh J_e.
Eigen::VectorXd assemble_W(const TorusSpec& spec, const Couplings& J);

/// Diagonal of the twisted weights. G1: phases exp(+-i pi/L) on E/W,
/// exp(+-i pi/M) on N/S, exp(+-i pi (1/L + 1/M)) on NE/SW. G2: 1 on E/W,
/// exp(+i pi/M) on N/NE, exp(-i pi/M) on S/SW.
ComplexVector assemble_W_tilde(const TorusSpec& spec, const Couplings& J, ProjectionVariant variant);

/// A K with its columns scaled by the diagonal weights: (K W)(e, f) = K(e, f) W(f).
ComplexMatrix times_diagonal(const ComplexMatrix& K, const ComplexVector& W);

struct Determinant {
  Complex value;          // finite only when !log_form
  double log_abs = 0.0;   // log |det|
  double phase = 0.0;     // arg det
  double rcond = 0.0;     // reciprocal condition estimate of the factored matrix
  bool log_form = false;  // dimension above kLogFormDimension
};

inline constexpr Eigen::Index kLogFormDimension = 200;

/// det(I - A) by LU with partial pivoting.
Determinant det_one_minus(const ComplexMatrix& A);

/// Momentum (k1, k2); k3 = k1 + k2 is derived.
struct MomentumPoint {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3() const noexcept { return k1 + k2; }
};

/// Closed form of det[1 - W_hat(k) K_hat(0)] with t_i = tanh J_i, indices mod 3:
///   prod (1 + t_i^2) + 8 prod t_i - 2 sum t_i (1 - t_{i+1}^2)(1 - t_{i+2}^2) cos k_i.
double fourier_block_det(const MomentumPoint& k, const Couplings& J);

/// The same determinant computed from the explicit 6x6 block.
Complex fourier_block_det_direct(const MomentumPoint& k, const Couplings& J);

/// log det(1 - K_tilde W_tilde) as a sum of log fourier_block_det over the
/// momentum grid: G1 uses shifted grids in both k1 and k2, G2 shifts only k2.
/// Throws NumericalError if a factor is below -1e-12.
double product_formula_log_det(const TorusSpec& spec, const Couplings& J, ProjectionVariant variant);
double product_formula_log_det_serial(const TorusSpec& spec, const Couplings& J,
                                      ProjectionVariant variant);

struct KacWardPair {
  double sqrt1 = 0.0;
  double sqrt2 = 0.0;
};

/// Nonnegative square roots of det(1 - K^(i) W), i = 1, 2. Requires L, M >= 3.
/// Throws NumericalError if a determinant is negative or complex beyond tolerance.
KacWardPair kacward_partition_pair(const TorusSpec& spec, const Couplings& J);

/// Square roots on the branch that equals 1 at W = 0: sqrt det(1 - s K^(i) W)
/// continued along s = (1 - e^{i pi theta}) / 2, theta in [0, 1]. The result
/// is the signed even-subgraph sum, which may be negative for frustrated
/// couplings. Requires L, M >= 2.
KacWardPair kacward_signed_pair(const TorusSpec& spec, const Couplings& J);

}  // namespace kwising
