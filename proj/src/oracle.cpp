#include "kwising/oracle.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <string>
#include <vector>

#include "kwising/errors.hpp"
#include "kwising/parallel.hpp"

namespace kwising {

namespace {

void require_oracle_torus(const TorusSpec& spec) {
  if (spec.L() < 3 || spec.M() < 3) {
    throw std::invalid_argument("oracle comparisons need L, M >= 3");
  }
}

// Pair lists per edge class: (tail site, head site).
struct BondTable {
  std::array<std::vector<std::array<int, 2>>, 3> pairs;
};

BondTable bond_table(const TorusSpec& spec) {
  BondTable t;
  constexpr std::array dirs{Direction::E, Direction::N, Direction::NE};
  for (int j = 0; j < spec.M(); ++j) {
    for (int i = 0; i < spec.L(); ++i) {
      for (int c = 0; c < 3; ++c) {
        const DirectedEdge e{{i, j}, dirs[c]};
        t.pairs[c].push_back({site_index(spec, e.site), site_index(spec, endpoint(spec, e))});
      }
    }
  }
  return t;
}

void require_brute_force(const TorusSpec& spec) {
  require_oracle_torus(spec);
  if (spec.sites() > kMaxBruteForceSites) {
    throw SizeExceeded("brute-force enumeration limited to " +
                       std::to_string(kMaxBruteForceSites) + " sites");
  }
}

template <class Reduce>
double brute_force_impl(const TorusSpec& spec, const Couplings& J, Reduce&& reduce) {
  require_brute_force(spec);
  const BondTable bonds = bond_table(spec);
  const int n = spec.sites();
  const std::array<double, 3> coupling = J.as_array();
  // exp(J_c * (n - 2 m)) for m mismatched bonds of class c.
  std::array<std::vector<double>, 3> table;
  for (int c = 0; c < 3; ++c) {
    table[c].resize(static_cast<std::size_t>(n + 1));
    for (int m = 0; m <= n; ++m) table[c][m] = std::exp(coupling[c] * (n - 2 * m));
  }
  const std::int64_t configs = std::int64_t{1} << n;
  return reduce(configs, [&](std::int64_t cfg) {
    double w = 1.0;
    for (int c = 0; c < 3; ++c) {
      int mismatched = 0;
      for (const auto& [a, b] : bonds.pairs[c]) {
        mismatched += static_cast<int>(((cfg >> a) ^ (cfg >> b)) & 1);
      }
      w *= table[c][mismatched];
    }
    return w;
  });
}

void require_cycle_space(const TorusSpec& spec) {
  require_oracle_torus(spec);
  if (2 * spec.sites() + 1 > kMaxCycleDimension) {
    throw SizeExceeded("even-subgraph enumeration limited to cycle dimension " +
                       std::to_string(kMaxCycleDimension));
  }
}

// Extended precision: in frustrated regimes the signed sums are up to ~1e6
// smaller than the sum of |weights|, so double rounding of each term would
// cost that factor in accuracy.
std::array<std::vector<long double>, 3> tanh_powers(const TorusSpec& spec, const Couplings& J) {
  std::array<std::vector<long double>, 3> pw;
  const std::array<double, 3> c = J.as_array();
  for (int k = 0; k < 3; ++k) {
    const long double t = std::tanh(static_cast<long double>(c[k]));
    pw[k].resize(static_cast<std::size_t>(spec.sites() + 1));
    pw[k][0] = 1.0L;
    for (int m = 1; m <= spec.sites(); ++m) pw[k][m] = pw[k][m - 1] * t;
  }
  return pw;
}

constexpr int kChunkBits = 12;

}  // namespace

double brute_force_Z(const TorusSpec& spec, const Couplings& J) {
  return brute_force_impl(spec, J, [](std::int64_t n, auto&& term) { return parallel_sum(n, term); });
}

double brute_force_Z_serial(const TorusSpec& spec, const Couplings& J) {
  return brute_force_impl(spec, J, [](std::int64_t n, auto&& term) { return serial_sum(n, term); });
}

double high_temperature_prefactor(const TorusSpec& spec, const Couplings& J) {
  const double per_site = 2.0 * std::cosh(J.J1) * std::cosh(J.J2) * std::cosh(J.J3);
  return std::pow(per_site, spec.sites());
}

EvenSubgraphSums even_subgraph_sums(const TorusSpec& spec, const Couplings& J,
                                    const FaithfulProjection& p1, const FaithfulProjection& p2) {
  require_cycle_space(spec);
  if (!(p1.spec() == spec) || !(p2.spec() == spec) || p1.variant() != ProjectionVariant::G1 ||
      p2.variant() != ProjectionVariant::G2) {
    throw std::invalid_argument("even_subgraph_sums expects projections G1 and G2 of the same torus");
  }
  const std::vector<EdgeMask> basis = cycle_space_basis(spec);
  const HandleMasks hm = handle_masks(spec);
  const auto pw = tanh_powers(spec, J);
  const int dim = static_cast<int>(basis.size());
  const int low_bits = std::min(dim, kChunkBits);
  const std::int64_t chunks = std::int64_t{1} << (dim - low_bits);
  const std::int64_t per_chunk = std::int64_t{1} << low_bits;

  std::vector<std::array<long double, 4>> partial(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t c = 0; c < chunks; ++c) {
    EdgeMask mask = 0;
    for (int b = 0; b < dim - low_bits; ++b) {
      if ((c >> b) & 1) mask ^= basis[static_cast<std::size_t>(low_bits + b)];
    }
    std::array<BasicCompensatedSum<long double>, 4> acc;
    // Gray-code walk over the low basis vectors.
    for (std::int64_t g = 0; g < per_chunk; ++g) {
      if (g > 0) mask ^= basis[static_cast<std::size_t>(std::countr_zero(static_cast<std::uint64_t>(g)))];
      const long double w = pw[0][std::popcount(mask & hm.by_class[0])] *
                       pw[1][std::popcount(mask & hm.by_class[1])] *
                       pw[2][std::popcount(mask & hm.by_class[2])];
      HandleStats s;
      s.n_hv = std::popcount(mask & hm.corner);
      s.n_h = std::popcount(mask & hm.horizontal) + s.n_hv;
      s.n_v = std::popcount(mask & hm.vertical);
      const int n1 = crossing_count_from_stats(ProjectionVariant::G1, s);
      const int n2 = crossing_count_from_stats(ProjectionVariant::G2, s);
      acc[0].add(w);
      acc[1].add((n1 & 1) ? -w : w);
      acc[2].add((n2 & 1) ? -w : w);
      acc[3].add((s.n_h & 1) ? w : 0.0L);
    }
    for (int k = 0; k < 4; ++k) partial[static_cast<std::size_t>(c)][k] = acc[k].value();
  }
  std::array<BasicCompensatedSum<long double>, 4> total;
  for (const auto& p : partial) {
    for (int k = 0; k < 4; ++k) total[k].add(p[k]);
  }
  return {static_cast<double>(total[0].value()), static_cast<double>(total[1].value()),
          static_cast<double>(total[2].value()), static_cast<double>(total[3].value())};
}

EvenSubgraphSums even_subgraph_sums(const TorusSpec& spec, const Couplings& J) {
  return even_subgraph_sums(spec, J, FaithfulProjection(spec, ProjectionVariant::G1),
                            FaithfulProjection(spec, ProjectionVariant::G2));
}

EvenSubgraphSums even_subgraph_sums_serial(const TorusSpec& spec, const Couplings& J,
                                           const FaithfulProjection& p1,
                                           const FaithfulProjection& p2) {
  require_cycle_space(spec);
  const std::vector<EdgeMask> basis = cycle_space_basis(spec);
  const int dim = static_cast<int>(basis.size());
  std::array<BasicCompensatedSum<long double>, 4> acc;
  for (std::int64_t s = 0; s < (std::int64_t{1} << dim); ++s) {
    EdgeMask mask = 0;
    for (int b = 0; b < dim; ++b) {
      if ((s >> b) & 1) mask ^= basis[static_cast<std::size_t>(b)];
    }
    const EvenSubgraph g(spec, mask);
    long double w = 1.0L;
    for (int u = 0; u < spec.undirected_edges(); ++u) {
      if (g.contains(u)) w *= std::tanh(static_cast<long double>(coupling_of(static_cast<EdgeClass>(u % 3), J)));
    }
    const int n1 = crossing_count(p1, g);
    const int n2 = crossing_count(p2, g);
    acc[0].add(w);
    acc[1].add((n1 % 2) ? -w : w);
    acc[2].add((n2 % 2) ? -w : w);
    acc[3].add((handle_stats(g).n_h % 2) ? w : 0.0L);
  }
  return {static_cast<double>(acc[0].value()), static_cast<double>(acc[1].value()),
          static_cast<double>(acc[2].value()), static_cast<double>(acc[3].value())};
}

namespace {

double spin(int state, int k) { return ((state >> k) & 1) ? 1.0 : -1.0; }

void require_transfer_M(int M, int max_M) {
  if (M < 2 || M > max_M) {
    throw SizeExceeded("transfer matrix requires 2 <= M <= " + std::to_string(max_M) +
                       ", got M = " + std::to_string(M));
  }
}

double column_energy(int M, const Couplings& J, int eta) {
  double e = 0.0;
  for (int k = 0; k < M; ++k) e += J.J2 * spin(eta, k) * spin(eta, (k + 1) % M);
  return e;
}

}  // namespace

TransferMatrix transfer_matrix(int M, const Couplings& J) {
  require_transfer_M(M, kMaxDenseTransferM);
  const int dim = 1 << M;
  TransferMatrix T{M, Eigen::MatrixXd(dim, dim)};
  for (int a = 0; a < dim; ++a) {
    const double inner = column_energy(M, J, a);
    for (int b = 0; b < dim; ++b) {
      double e = inner;
      for (int k = 0; k < M; ++k) {
        e += spin(a, k) * (J.J1 * spin(b, k) + J.J3 * spin(b, (k + 1) % M));
      }
      T.entries(a, b) = std::exp(e);
    }
  }
  return T;
}

double trace_power(const TransferMatrix& T, int L) {
  if (L < 1) throw std::invalid_argument("trace_power needs L >= 1");
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(T.entries.rows(), T.entries.cols());
  Eigen::MatrixXd base = T.entries;
  for (int e = L; e > 0; e >>= 1) {
    if (e & 1) result = result * base;
    if (e > 1) base = base * base;
  }
  return result.trace();
}

void apply_transfer(int M, const Couplings& J, const Eigen::VectorXd& in, Eigen::VectorXd& out) {
  require_transfer_M(M, kMaxTransferM);
  const int dim = 1 << M;
  if (in.size() != dim) throw std::invalid_argument("apply_transfer: vector size mismatch");
  // Mixed state: bits 0..k-1 hold the new column eta, bits k..M-1 the old
  // column eta', bit M keeps eta'_1 for the wrap-around oblique bond.
  const int ext = dim << 1;
  std::vector<double> cur(static_cast<std::size_t>(ext), 0.0);
  std::vector<double> next(static_cast<std::size_t>(ext));
  for (int s = 0; s < dim; ++s) cur[static_cast<std::size_t>(s | ((s & 1) << M))] = in[s];

  const std::array<double, 2> e1 = {std::exp(-J.J1), std::exp(J.J1)};  // by [eta_1 == eta'_1]
  // boltz[a][b] = exp(J1 s_a + J3 s_b) with s = -1, +1 for a, b = 0, 1.
  double boltz[2][2];
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) boltz[a][b] = std::exp(J.J1 * (2 * a - 1) + J.J3 * (2 * b - 1));
  }
  // Site 1: the old spin is kept in the extra bit, so no summation here.
  for (int s = 0; s < ext; ++s) {
    const int x = (s >> M) & 1;
    const double v = cur[static_cast<std::size_t>((s & ~1) | x)];
    next[static_cast<std::size_t>(s)] = v * e1[((s & 1) == x) ? 1 : 0];
  }
  std::swap(cur, next);
  for (int k = 1; k < M; ++k) {
    const int bit = 1 << k;
    for (int s = 0; s < ext; ++s) {
      const int a = (s >> k) & 1;
      const int b = (s >> (k - 1)) & 1;
      next[static_cast<std::size_t>(s)] = boltz[a][b] * cur[static_cast<std::size_t>(s | bit)] +
                                          boltz[1 - a][1 - b] * cur[static_cast<std::size_t>(s & ~bit)];
    }
    std::swap(cur, next);
  }
  out.resize(dim);
  for (int s = 0; s < dim; ++s) {
    const double last = spin(s, M - 1);
    const double total = std::exp(J.J3 * last) * cur[static_cast<std::size_t>(s | dim)] +
                         std::exp(-J.J3 * last) * cur[static_cast<std::size_t>(s)];
    out[s] = std::exp(column_energy(M, J, s)) * total;
  }
}

PerronRoot perron_root(int M, const Couplings& J, double rel_tol, int max_iterations) {
  require_transfer_M(M, kMaxTransferM);
  const int dim = 1 << M;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(dim).normalized();
  Eigen::VectorXd w(dim);
  double lambda = 0.0;
  int stable = 0;
  for (int it = 1; it <= max_iterations; ++it) {
    apply_transfer(M, J, v, w);
    // The leading vector is even under the global spin flip; keeping the
    // iterate in that sector removes the near-degenerate odd partner.
    for (int s = 0; s < dim / 2; ++s) {
      const double sym = 0.5 * (w[s] + w[dim - 1 - s]);
      w[s] = sym;
      w[dim - 1 - s] = sym;
    }
    const double norm = w.norm();
    w /= norm;
    const double change = (w - v).lpNorm<Eigen::Infinity>();
    const double prev = lambda;
    lambda = norm;
    v.swap(w);
    if (std::abs(lambda - prev) <= rel_tol * lambda && change <= 1e-13) {
      if (++stable >= 3) return {lambda, it};
    } else {
      stable = 0;
    }
  }
  throw NumericalError("power iteration for the transfer matrix did not converge");
}

double cylinder_free_energy_tm(int M, const Couplings& J) {
  require_transfer_M(M, kMaxTransferM);
  if (M <= 6) {
    const TransferMatrix T = transfer_matrix(M, J);
    Eigen::EigenSolver<Eigen::MatrixXd> es(T.entries, false);
    double best = 0.0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      best = std::max(best, es.eigenvalues()[k].real());
    }
    return -std::log(best) / M;
  }
  return -std::log(perron_root(M, J).lambda) / M;
}

}  // namespace kwising
