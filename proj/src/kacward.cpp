#include "kwising/kacward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "kwising/errors.hpp"
#include "kwising/parallel.hpp"

namespace kwising {

namespace {

constexpr double kPi = std::numbers::pi;

template <class Real>
using MatrixC = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <class Real>
std::complex<Real> half_angle_phase(int eighths) {
  return std::polar(Real(1), eighths * std::numbers::pi_v<Real> / 16);
}

template <class Real>
MatrixC<Real> assemble(const TorusSpec& spec, const FaithfulProjection* projection) {
  const int n = spec.directed_edges();
  MatrixC<Real> K = MatrixC<Real>::Zero(n, n);
  for (int row = 0; row < n; ++row) {
    const DirectedEdge e = unflatten(spec, row);
    const Site head = endpoint(spec, e);
    const Real sign = projection ? Real(projection->half_angle_sign(e)) : Real(1);
    for (Direction d : kDirections) {
      if (d == reverse(e.dir)) continue;
      const int col = flatten(spec, {head, d});
      K(row, col) = sign * half_angle_phase<Real>(turning_angle_eighths(e.dir, d));
    }
  }
  return K;
}

template <class Real>
struct LogDet {
  Real log_abs = 0;
  Real phase = 0;
  double rcond = 0.0;
  bool zero = false;
};

// log |det(I - A)| and arg det(I - A) from an LU factorization with partial pivoting.
template <class Real>
LogDet<Real> log_det_one_minus(const MatrixC<Real>& A) {
  const Eigen::Index n = A.rows();
  LogDet<Real> d;
  if (n == 0) {
    d.rcond = 1.0;
    return d;
  }
  const MatrixC<Real> I_minus_A = MatrixC<Real>::Identity(n, n) - A;
  const Eigen::PartialPivLU<MatrixC<Real>> lu(I_minus_A);
  d.rcond = static_cast<double>(lu.rcond());
  const auto& LU = lu.matrixLU();
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::complex<Real> u = LU(k, k);
    if (u == std::complex<Real>(0)) {
      d.zero = true;
      return d;
    }
    d.log_abs += std::log(std::abs(u));
    d.phase += std::arg(u);
  }
  if (lu.permutationP().determinant() < 0) d.phase += std::numbers::pi_v<Real>;
  d.phase = std::remainder(d.phase, 2 * std::numbers::pi_v<Real>);
  return d;
}

}  // namespace

Block6 local_phase_block() {
  Block6 B = Block6::Zero();
  for (Direction a : kDirections) {
    for (Direction b : kDirections) {
      if (b == reverse(a)) continue;
      B(static_cast<int>(a), static_cast<int>(b)) = half_angle_phase<double>(turning_angle_eighths(a, b));
    }
  }
  return B;
}

ComplexMatrix assemble_K(const TorusSpec& spec, ProjectionVariant variant) {
  const FaithfulProjection p(spec, variant);
  return assemble<double>(spec, &p);
}

ComplexMatrix assemble_K_tilde(const TorusSpec& spec) { return assemble<double>(spec, nullptr); }

Eigen::VectorXd assemble_W(const TorusSpec& spec, const Couplings& J) {
  const int n = spec.directed_edges();
  Eigen::VectorXd W(n);
  for (int f = 0; f < n; ++f) W[f] = std::tanh(coupling_of(unflatten(spec, f), J));
  return W;
}

ComplexVector assemble_W_tilde(const TorusSpec& spec, const Couplings& J, ProjectionVariant variant) {
  const double ph = kPi / spec.L();
  const double pv = kPi / spec.M();
  std::array<double, 6> angle{};
  if (variant == ProjectionVariant::G1) {
    angle = {ph, -ph, pv, -pv, ph + pv, -(ph + pv)};
  } else {
    angle = {0.0, 0.0, pv, -pv, pv, -pv};
  }
  const Eigen::VectorXd W = assemble_W(spec, J);
  ComplexVector Wt(W.size());
  for (Eigen::Index f = 0; f < W.size(); ++f) {
    Wt[f] = W[f] * std::polar(1.0, angle[static_cast<std::size_t>(f % 6)]);
  }
  return Wt;
}

ComplexMatrix times_diagonal(const ComplexMatrix& K, const ComplexVector& W) {
  return K * W.asDiagonal();
}

Determinant det_one_minus(const ComplexMatrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("det_one_minus needs a square matrix");
  const LogDet<double> ld = log_det_one_minus<double>(A);
  Determinant d;
  d.rcond = ld.rcond;
  d.log_form = A.rows() > kLogFormDimension;
  if (ld.zero) {
    d.log_abs = -std::numeric_limits<double>::infinity();
    d.value = 0.0;
    return d;
  }
  d.log_abs = ld.log_abs;
  d.phase = ld.phase;
  d.value = d.log_form ? Complex(std::numeric_limits<double>::quiet_NaN(), 0.0)
                       : std::polar(std::exp(ld.log_abs), ld.phase);
  return d;
}

double fourier_block_det(const MomentumPoint& k, const Couplings& J) {
  const std::array<double, 3> t = {std::tanh(J.J1), std::tanh(J.J2), std::tanh(J.J3)};
  const std::array<double, 3> kk = {k.k1, k.k2, k.k3()};
  double value = (1 + t[0] * t[0]) * (1 + t[1] * t[1]) * (1 + t[2] * t[2]) + 8 * t[0] * t[1] * t[2];
  for (int i = 0; i < 3; ++i) {
    const double a = t[(i + 1) % 3];
    const double b = t[(i + 2) % 3];
    value -= 2 * t[i] * (1 - a * a) * (1 - b * b) * std::cos(kk[i]);
  }
  return value;
}

Complex fourier_block_det_direct(const MomentumPoint& k, const Couplings& J) {
  const std::array<double, 3> t = {std::tanh(J.J1), std::tanh(J.J2), std::tanh(J.J3)};
  const std::array<double, 6> momentum = {k.k1, -k.k1, k.k2, -k.k2, k.k3(), -k.k3()};
  Block6 W = Block6::Zero();
  for (int a = 0; a < 6; ++a) W(a, a) = t[static_cast<std::size_t>(a / 2)] * std::polar(1.0, momentum[a]);
  const Block6 B = Block6::Identity() - W * local_phase_block();
  return B.determinant();
}

namespace {

template <class Reduce>
double product_formula_impl(const TorusSpec& spec, const Couplings& J, ProjectionVariant variant,
                            Reduce&& reduce) {
  const int L = spec.L();
  const int M = spec.M();
  const double shift1 = variant == ProjectionVariant::G1 ? kPi / L : 0.0;
  const double shift2 = kPi / M;
  return reduce(std::int64_t{L} * M, [&](std::int64_t idx) {
    const MomentumPoint k{2 * kPi * static_cast<double>(idx / M) / L + shift1,
                          2 * kPi * static_cast<double>(idx % M) / M + shift2};
    const double factor = fourier_block_det(k, J);
    if (factor < -1e-12) {
      throw NumericalError("negative Fourier factor in the Kac-Ward product formula");
    }
    return std::log(std::max(factor, 0.0));
  });
}

}  // namespace

double product_formula_log_det(const TorusSpec& spec, const Couplings& J, ProjectionVariant variant) {
  // Exceptions must not cross the OpenMP region; grids here are at most a
  // few thousand points, so this path validates serially before reducing.
  for (int a = 0; a < spec.L(); ++a) {
    for (int b = 0; b < spec.M(); ++b) {
      const double shift1 = variant == ProjectionVariant::G1 ? kPi / spec.L() : 0.0;
      const MomentumPoint k{2 * kPi * a / spec.L() + shift1, 2 * kPi * b / spec.M() + kPi / spec.M()};
      if (fourier_block_det(k, J) < -1e-12) {
        throw NumericalError("negative Fourier factor in the Kac-Ward product formula");
      }
    }
  }
  const int L = spec.L();
  const int M = spec.M();
  const double shift1 = variant == ProjectionVariant::G1 ? kPi / L : 0.0;
  const double shift2 = kPi / M;
  return parallel_sum(std::int64_t{L} * M, [&](std::int64_t idx) {
    const MomentumPoint k{2 * kPi * static_cast<double>(idx / M) / L + shift1,
                          2 * kPi * static_cast<double>(idx % M) / M + shift2};
    return std::log(std::max(fourier_block_det(k, J), 0.0));
  });
}

double product_formula_log_det_serial(const TorusSpec& spec, const Couplings& J,
                                      ProjectionVariant variant) {
  return product_formula_impl(spec, J, variant,
                              [](std::int64_t n, auto&& term) { return serial_sum(n, term); });
}

namespace {

// The partition-function identities are evaluated in extended precision:
// for frustrated couplings the signed sums are far smaller than the sum of
// |weights|, and the determinant inherits that conditioning.
using Real = long double;

MatrixC<Real> kw_matrix(const TorusSpec& spec, const Couplings& J, ProjectionVariant variant) {
  const FaithfulProjection p(spec, variant);
  MatrixC<Real> K = assemble<Real>(spec, &p);
  for (int f = 0; f < spec.directed_edges(); ++f) {
    K.col(f) *= std::tanh(static_cast<Real>(coupling_of(unflatten(spec, f), J)));
  }
  return K;
}

Real nonnegative_sqrt(const MatrixC<Real>& KW) {
  const LogDet<Real> d = log_det_one_minus<Real>(KW);
  if (d.zero) return 0;
  const std::complex<Real> value = std::polar(std::exp(d.log_abs), d.phase);
  const Real scale = std::max(Real(1), std::abs(value));
  if (std::abs(value.imag()) > Real(1e-8) * scale || value.real() < Real(-1e-10) * scale) {
    throw NumericalError("Kac-Ward determinant is not a nonnegative real number");
  }
  return std::sqrt(std::max(value.real(), Real(0)));
}

Real continued_sqrt(const MatrixC<Real>& KW) {
  const std::complex<Real> i_pi(0, std::numbers::pi_v<Real>);
  auto root_at = [&](Real theta) {
    const std::complex<Real> s = Real(0.5) * (Real(1) - std::exp(i_pi * theta));
    const LogDet<Real> d = log_det_one_minus<Real>(s * KW);
    if (d.zero) throw NumericalError("Kac-Ward determinant vanishes on the continuation path");
    return std::polar(std::exp(d.log_abs / 2), d.phase / 2);
  };
  Real theta = 0;
  Real step = Real(1) / 64;
  std::complex<Real> root = 1;
  while (theta < 1) {
    const Real next = std::min(Real(1), theta + step);
    std::complex<Real> candidate = root_at(next);
    if (std::abs(candidate + root) < std::abs(candidate - root)) candidate = -candidate;
    if (std::abs(candidate - root) > Real(0.2) * std::max(std::abs(root), std::abs(candidate))) {
      step /= 2;
      if (step < Real(1e-12)) throw NumericalError("Kac-Ward square root continuation stalled");
      continue;
    }
    theta = next;
    root = candidate;
    step = std::min(step * Real(1.5), Real(1) / 16);
  }
  if (std::abs(root.imag()) > Real(1e-8) * std::max(Real(1), std::abs(root))) {
    throw NumericalError("continued Kac-Ward square root is not real");
  }
  return root.real();
}

}  // namespace

KacWardPair kacward_partition_pair(const TorusSpec& spec, const Couplings& J) {
  if (spec.L() < 3 || spec.M() < 3) {
    throw std::invalid_argument("Kac-Ward partition identity needs L, M >= 3");
  }
  if (spec.directed_edges() > kLogFormDimension) {
    throw SizeExceeded("Kac-Ward partition pair limited to dimension 200");
  }
  return {static_cast<double>(nonnegative_sqrt(kw_matrix(spec, J, ProjectionVariant::G1))),
          static_cast<double>(nonnegative_sqrt(kw_matrix(spec, J, ProjectionVariant::G2)))};
}

KacWardPair kacward_signed_pair(const TorusSpec& spec, const Couplings& J) {
  if (spec.directed_edges() > kLogFormDimension) {
    throw SizeExceeded("Kac-Ward partition pair limited to dimension 200");
  }
  return {static_cast<double>(continued_sqrt(kw_matrix(spec, J, ProjectionVariant::G1))),
          static_cast<double>(continued_sqrt(kw_matrix(spec, J, ProjectionVariant::G2)))};
}

}  // namespace kwising
