#include <stdexcept>
#include <omp.h>

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "generators.hpp"
#include "kwising/errors.hpp"
#include "kwising/kacward.hpp"
#include "kwising/oracle.hpp"

using namespace kwising;

namespace {

const double kPi = std::numbers::pi;

Complex phase(double angle) { return std::polar(1.0, angle); }

double log_det_direct(const TorusSpec& s, const Couplings& J, ProjectionVariant v) {
  const ComplexMatrix KW = times_diagonal(assemble_K_tilde(s), assemble_W_tilde(s, J, v));
  return det_one_minus(KW).log_abs;
}

}  // namespace

TEST_CASE("local phase block") {
  const Block6 B = local_phase_block();
  for (Direction a : kDirections) {
    for (Direction b : kDirections) {
      const Complex z = B(static_cast<int>(a), static_cast<int>(b));
      if (b == reverse(a)) {
        CHECK(z == Complex{0.0, 0.0});
      } else {
        CHECK(std::abs(std::abs(z) - 1.0) < 1e-15);
      }
    }
  }
  CHECK(std::abs(B(0, 2) - phase(kPi / 4)) < 1e-15);  // E then N
  CHECK(std::abs(B(0, 4) - phase(kPi / 8)) < 1e-15);  // E then NE
  CHECK(B(0, 0) == Complex{1.0, 0.0});
}

TEST_CASE("Kac-Ward matrix entries") {
  const TorusSpec s(3, 3);
  const ComplexMatrix K = assemble_K(s, ProjectionVariant::G1);
  const int e = flatten(s, DirectedEdge{{0, 0}, Direction::E});
  const int f = flatten(s, DirectedEdge{{1, 0}, Direction::N});
  CHECK(std::abs(K(e, f) - phase(kPi / 4)) < 1e-15);

  // The wrapping E edge winds once: an extra factor -1 against the straight case.
  const int wrap = flatten(s, DirectedEdge{{2, 0}, Direction::E});
  const int succ = flatten(s, DirectedEdge{{0, 0}, Direction::N});
  CHECK(std::abs(K(wrap, succ) + phase(kPi / 4)) < 1e-15);

  // Each row has exactly five successors.
  for (int r = 0; r < K.rows(); ++r) {
    int nonzero = 0;
    for (int c = 0; c < K.cols(); ++c) nonzero += std::abs(K(r, c)) > 0.0 ? 1 : 0;
    CHECK(nonzero == 5);
  }
}

TEST_CASE("weights") {
  const TorusSpec s(3, 3);
  CHECK(assemble_W(s, Couplings{}).isZero());
  CHECK(assemble_W_tilde(s, Couplings{}, ProjectionVariant::G1).isZero());
  const Couplings J{0.5, -0.3, 0.8};
  const ComplexVector W2 = assemble_W_tilde(s, J, ProjectionVariant::G2);
  const int east = flatten(s, DirectedEdge{{1, 1}, Direction::E});
  const int west = flatten(s, DirectedEdge{{1, 1}, Direction::W});
  CHECK(std::abs(W2(east) - Complex{std::tanh(0.5), 0.0}) < 1e-15);
  CHECK(std::abs(W2(west) - Complex{std::tanh(0.5), 0.0}) < 1e-15);
  const ComplexVector W1 = assemble_W_tilde(s, J, ProjectionVariant::G1);
  CHECK(std::abs(W1(east) - std::tanh(0.5) * phase(kPi / 3)) < 1e-15);
}

TEST_CASE("det(1 - A) against Eigen's determinant") {
  CHECK(det_one_minus(ComplexMatrix::Zero(5, 5)).value == Complex{1.0, 0.0});
  kwtest::Rng rng(3);
  for (int n : {1, 4, 17, 40}) {
    ComplexMatrix A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        A(i, j) = Complex{kwtest::uniform(rng, -0.3, 0.3), kwtest::uniform(rng, -0.3, 0.3)};
    const Complex ref = (ComplexMatrix::Identity(n, n) - A).determinant();
    const Determinant d = det_one_minus(A);
    CHECK(std::abs(d.value - ref) <= 1e-12 * std::abs(ref));
    CHECK(std::abs(d.log_abs - std::log(std::abs(ref))) < 1e-12);
    CHECK(d.rcond > 0.0);
  }
}

TEST_CASE("large determinants switch to log form") {
  const TorusSpec s(6, 6);  // 216 directed edges
  const Determinant d = det_one_minus(times_diagonal(assemble_K_tilde(s),
                                                     assemble_W_tilde(s, Couplings{0.2, 0.2, 0.2},
                                                                      ProjectionVariant::G1)));
  CHECK(d.log_form);
  CHECK(std::isfinite(d.log_abs));
  CHECK(std::abs(d.log_abs - product_formula_log_det(s, Couplings{0.2, 0.2, 0.2},
                                                     ProjectionVariant::G1)) < 1e-9);
}

TEST_CASE("Fourier block: closed form against the explicit 6x6 determinant") {
  CHECK(fourier_block_det(MomentumPoint{0.4, -1.2}, Couplings{}) == 1.0);
  const double t = std::tanh(1.0);
  const double at_zero = std::pow(1 + t * t, 3) + 8 * t * t * t - 6 * t * std::pow(1 - t * t, 2);
  CHECK(fourier_block_det(MomentumPoint{}, Couplings{1, 1, 1}) == doctest::Approx(at_zero).epsilon(1e-13));
  CHECK(std::abs(fourier_block_det_direct(MomentumPoint{}, Couplings{1, 1, 1}) - at_zero) < 1e-12);

  kwtest::Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const Couplings J = kwtest::couplings(rng);
    const MomentumPoint k = kwtest::momentum(rng);
    const Complex direct = fourier_block_det_direct(k, J);
    CHECK(std::abs(direct - fourier_block_det(k, J)) < 1e-12);
    CHECK(fourier_block_det(k, J) >= -1e-14);
  }
}

TEST_CASE("translation-invariant determinant equals the Fourier product") {
  kwtest::Rng rng(15);
  CHECK(product_formula_log_det(TorusSpec(3, 3), Couplings{}, ProjectionVariant::G1) == 0.0);
  for (int i = 0; i < 5; ++i) {
    const Couplings J = i == 0 ? kwtest::signed_couplings(rng, -1.0) : kwtest::couplings(rng);
    for (int L = 2; L <= 4; ++L) {
      for (int M = 2; M <= 4; ++M) {
        const TorusSpec s(L, M);
        for (auto v : {ProjectionVariant::G1, ProjectionVariant::G2}) {
          const double direct = log_det_direct(s, J, v);
          const double product = product_formula_log_det(s, J, v);
          CHECK(std::abs(std::exp(direct - product) - 1.0) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("the twisted weights are a gauge of the windings") {
  kwtest::Rng rng(16);
  for (int i = 0; i < 5; ++i) {
    const Couplings J = kwtest::couplings(rng);
    for (auto [L, M] : {std::pair{3, 3}, std::pair{3, 4}, std::pair{4, 2}}) {
      const TorusSpec s(L, M);
      for (auto v : {ProjectionVariant::G1, ProjectionVariant::G2}) {
        const ComplexVector W = assemble_W(s, J).cast<Complex>();
        const Determinant a = det_one_minus(times_diagonal(assemble_K(s, v), W));
        const Determinant b = det_one_minus(times_diagonal(assemble_K_tilde(s), assemble_W_tilde(s, J, v)));
        CHECK(std::abs(a.value - b.value) <= 1e-10 * std::max(1.0, std::abs(a.value)));
      }
    }
  }
}

TEST_CASE("product formula: serial and parallel agree; thread count does not matter") {
  const TorusSpec s(200, 150);
  const Couplings J{0.6, -0.2, 0.9};
  const double par = product_formula_log_det(s, J, ProjectionVariant::G2);
  const double ser = product_formula_log_det_serial(s, J, ProjectionVariant::G2);
  CHECK(std::abs(par - ser) <= 1e-12 * std::abs(ser));

  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double one = product_formula_log_det(s, J, ProjectionVariant::G1);
  omp_set_num_threads(4);
  const double four = product_formula_log_det(s, J, ProjectionVariant::G1);
  omp_set_num_threads(saved);
  CHECK(one == four);
}

TEST_CASE("Kac-Ward roots at zero coupling") {
  const KacWardPair p = kacward_partition_pair(TorusSpec(3, 3), Couplings{});
  CHECK(p.sqrt1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.sqrt2 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("signed Kac-Ward roots equal the signed even-subgraph sums") {
  kwtest::Rng rng(17);
  const TorusSpec s(3, 3);
  for (int i = 0; i < 6; ++i) {
    const Couplings J = i < 2 ? kwtest::signed_couplings(rng, -1.0) : kwtest::couplings(rng);
    const EvenSubgraphSums o = even_subgraph_sums(s, J);
    const KacWardPair signed_pair = kacward_signed_pair(s, J);
    const KacWardPair pair = kacward_partition_pair(s, J);
    CHECK(kwtest::rel(signed_pair.sqrt1, o.signed1) < 1e-10);
    CHECK(kwtest::rel(signed_pair.sqrt2, o.signed2) < 1e-10);
    CHECK(kwtest::rel(pair.sqrt1, std::abs(o.signed1)) < 1e-10);
    CHECK(kwtest::rel(pair.sqrt2, std::abs(o.signed2)) < 1e-10);
    CHECK(kwtest::rel(signed_pair.sqrt1 + signed_pair.sqrt2, 2.0 * (o.Ztilde - o.odd_h)) < 1e-10);
  }
}

TEST_CASE("ferromagnetic signed sums are positive") {
  kwtest::Rng rng(18);
  for (int i = 0; i < 4; ++i) {
    const KacWardPair p = kacward_signed_pair(TorusSpec(3, 4), kwtest::signed_couplings(rng, 1.0));
    CHECK(p.sqrt1 > 0.0);
    CHECK(p.sqrt2 > 0.0);
  }
}

TEST_CASE("Kac-Ward pair bounds") {
  CHECK_THROWS(kacward_partition_pair(TorusSpec(2, 3), Couplings{}));
  CHECK_THROWS_AS(kacward_partition_pair(TorusSpec(6, 6), Couplings{}), SizeExceeded);
  CHECK_THROWS_AS(kacward_signed_pair(TorusSpec(6, 6), Couplings{}), SizeExceeded);
}
