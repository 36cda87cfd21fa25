#pragma once

#include <cstdint>
#include <vector>

#include "kwising/lattice.hpp"

namespace kwising {

enum class ProjectionVariant : std::uint8_t { G1 = 1, G2 = 2 };

/// Which boundary an undirected edge wraps across. Horizontal handles connect
/// column L to column 1 (oblique ones included), vertical handles connect row M
/// to row 1; the corner handle (L,M)-(1,1) wraps across both.
enum class HandleKind : std::uint8_t { Straight, Horizontal, Vertical, Corner };

HandleKind handle_kind(const TorusSpec& spec, int undirected) noexcept;

/// Combinatorial data of one of the two faithful projections of the torus
/// graph: each wrap-around edge is a handle with an integer winding number,
/// and handles cross according to a fixed pattern. Handles leaving the top row
/// (vertical and corner) cross every handle leaving the right column
/// (horizontal and corner) exactly once. In G1 only the corner handle crosses
/// itself and it winds twice; in G2 the corner handle winds once and every
/// other horizontal handle crosses itself and winds twice.
class FaithfulProjection {
 public:
  FaithfulProjection(TorusSpec spec, ProjectionVariant variant);

  const TorusSpec& spec() const noexcept { return spec_; }
  ProjectionVariant variant() const noexcept { return variant_; }

  int winding(int undirected) const noexcept;
  bool self_crossing(int undirected) const noexcept;
  /// True iff the two distinct undirected edges u and v cross once.
  bool crosses(int u, int v) const noexcept;

  /// Total turning of the drawn curve of e, in radians: 2 pi * winding.
  double integrated_angle(const DirectedEdge& e) const noexcept;
  /// exp(i * integrated_angle / 2) = (-1)^winding.
  int half_angle_sign(const DirectedEdge& e) const noexcept;

 private:
  TorusSpec spec_;
  ProjectionVariant variant_;
};

/// Edge subsets as bitmasks over undirected edges; requires 3LM <= 64.
using EdgeMask = std::uint64_t;

inline constexpr int kMaxMaskEdges = 64;

bool fits_mask(const TorusSpec& spec) noexcept;

/// Every vertex has even degree in mask.
bool is_even(const TorusSpec& spec, EdgeMask mask);

/// An even subgraph: edge subset with empty boundary.
class EvenSubgraph {
 public:
  /// Throws std::invalid_argument if mask has a vertex of odd degree,
  /// SizeExceeded if the torus does not fit an EdgeMask.
  EvenSubgraph(const TorusSpec& spec, EdgeMask mask);

  static EvenSubgraph empty(const TorusSpec& spec) { return {spec, 0}; }

  const TorusSpec& spec() const noexcept { return spec_; }
  EdgeMask edges() const noexcept { return mask_; }
  bool contains(int undirected) const noexcept { return (mask_ >> undirected) & 1U; }

 private:
  TorusSpec spec_;
  EdgeMask mask_;
};

/// n0 = number of crossing pairs inside g plus self-crossing edges of g.
int crossing_count(const FaithfulProjection& p, const EvenSubgraph& g);

struct HandleStats {
  int n_h = 0;   // handles from column L to column 1, corner included
  int n_v = 0;   // handles from row M to row 1, corner excluded
  int n_hv = 0;  // 1 iff the corner handle is present
  friend bool operator==(const HandleStats&, const HandleStats&) = default;
};

HandleStats handle_stats(const EvenSubgraph& g);

/// Masks of the handle groups, used by the enumeration kernels.
struct HandleMasks {
  EdgeMask horizontal = 0;  // Horizontal only
  EdgeMask vertical = 0;    // Vertical only
  EdgeMask corner = 0;
  EdgeMask by_class[3] = {0, 0, 0};
};

HandleMasks handle_masks(const TorusSpec& spec);

/// Parity of n0 from handle counts alone: pairs = |A||B| - hv with
/// A = vertical + corner, B = horizontal + corner; self crossings are hv for G1
/// and (|B| - hv) for G2.
int crossing_count_from_stats(ProjectionVariant v, const HandleStats& s) noexcept;

/// Basis of the cycle space (mod 2) of the torus graph: one fundamental cycle
/// per non-tree edge of a BFS spanning tree, 2LM + 1 elements.
std::vector<EdgeMask> cycle_space_basis(const TorusSpec& spec);

/// One full horizontal ring at row j (0-based).
EdgeMask horizontal_ring(const TorusSpec& spec, int j);
/// One full vertical ring at column i (0-based).
EdgeMask vertical_ring(const TorusSpec& spec, int i);
/// Oblique ring starting at the origin, following NE steps until it closes.
EdgeMask oblique_ring(const TorusSpec& spec);

}  // namespace kwising
