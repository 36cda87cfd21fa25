#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kwising/lattice.hpp"
#include "kwising/quadrature.hpp"

namespace kwising {

struct VerifyCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;   // worst observed deviation
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<VerifyCheck> checks;
  bool all_passed() const;
};

/// |a - b| / max(|a|, |b|), zero when both vanish.
double relative_difference(double a, double b) noexcept;

/// Uniform couplings in [lo, hi]^3.
Couplings random_couplings(std::mt19937_64& rng, double lo = -1.5, double hi = 1.5);

/// count draws from rng; the first two are forced all-negative.
std::vector<Couplings> coupling_draws(std::mt19937_64& rng, int count);

/// The identity suite: Kac-Ward identity and determinant identities against the
/// even-subgraph oracle, the cylinder formula against the transfer matrix,
/// critical points, the quantum formula against exact diagonalization, the
/// Trotter route and the 2d-to-1d sum identity. Draws come from a generator
/// seeded with `seed`.
VerifyReport run_verify(std::uint64_t seed, const QuadratureSpec& quad = {});

}  // namespace kwising
