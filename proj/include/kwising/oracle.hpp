#pragma once

#include <Eigen/Dense>

#include "kwising/lattice.hpp"
#include "kwising/projection.hpp"

namespace kwising {

/// Exact enumeration bounds.
inline constexpr int kMaxBruteForceSites = 24;
inline constexpr int kMaxCycleDimension = 25;
inline constexpr int kMaxDenseTransferM = 12;
inline constexpr int kMaxTransferM = 14;

/// Z = sum over all 2^(LM) spin configurations of exp(sum_e J_e s_x s_y).
/// Requires L, M >= 3 and LM <= 24.
double brute_force_Z(const TorusSpec& spec, const Couplings& J);
double brute_force_Z_serial(const TorusSpec& spec, const Couplings& J);

/// Weighted sums over even subgraphs G with w(G) = prod tanh J_e:
///   Ztilde  = sum w
///   signed1 = sum w (-1)^{n0 on G1}
///   signed2 = sum w (-1)^{n0 on G2}
///   odd_h   = sum w 1{n_h odd}
struct EvenSubgraphSums {
  double Ztilde = 0.0;
  double signed1 = 0.0;
  double signed2 = 0.0;
  double odd_h = 0.0;
};

/// Requires L, M >= 3 and 2LM + 1 <= 25.
EvenSubgraphSums even_subgraph_sums(const TorusSpec& spec, const Couplings& J,
                                    const FaithfulProjection& p1, const FaithfulProjection& p2);
EvenSubgraphSums even_subgraph_sums(const TorusSpec& spec, const Couplings& J);
/// Reference: walks the subsets of the cycle basis one by one and evaluates
/// crossing counts from the pair structure of the projections.
EvenSubgraphSums even_subgraph_sums_serial(const TorusSpec& spec, const Couplings& J,
                                           const FaithfulProjection& p1,
                                           const FaithfulProjection& p2);

/// 2 prod_e cosh(J_e) factor of the high-temperature expansion:
/// Z = 2^(LM) prod_e cosh J_e * Ztilde.
double high_temperature_prefactor(const TorusSpec& spec, const Couplings& J);

/// Column transfer matrix between column configurations eta, eta' in {-1,1}^M,
/// bit k of the state index set <=> eta_{k+1} = +1:
///   T = exp{ sum_i J1 eta_i eta'_i + J2 eta_i eta_{i+1} + J3 eta_i eta'_{i+1} }.
struct TransferMatrix {
  int M = 0;
  Eigen::MatrixXd entries;
};

/// Dense construction, 2 <= M <= 12.
TransferMatrix transfer_matrix(int M, const Couplings& J);

/// Tr T^L by repeated squaring.
double trace_power(const TransferMatrix& T, int L);

/// out = T * in without materializing T; 2 <= M <= 14.
void apply_transfer(int M, const Couplings& J, const Eigen::VectorXd& in, Eigen::VectorXd& out);

struct PerronRoot {
  double lambda = 0.0;
  int iterations = 0;
};

/// Largest eigenvalue by power iteration from the all-ones vector.
PerronRoot perron_root(int M, const Couplings& J, double rel_tol = 1e-14,
                       int max_iterations = 200000);

/// -(1/M) log lambda_max(T): free energy density of the infinite cylinder.
double cylinder_free_energy_tm(int M, const Couplings& J);

}  // namespace kwising
