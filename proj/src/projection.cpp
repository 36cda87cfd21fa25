#include "kwising/projection.hpp"

#include <array>
#include <bit>
#include <numbers>
#include <deque>
#include <stdexcept>

#include "kwising/errors.hpp"

namespace kwising {

HandleKind handle_kind(const TorusSpec& spec, int undirected) noexcept {
  const int s = undirected / 3;
  const auto cls = static_cast<EdgeClass>(undirected % 3);
  const int i = s % spec.L();
  const int j = s / spec.L();
  const bool h = cls != EdgeClass::Vertical && i == spec.L() - 1;
  const bool v = cls != EdgeClass::Horizontal && j == spec.M() - 1;
  if (h && v) return HandleKind::Corner;
  if (h) return HandleKind::Horizontal;
  if (v) return HandleKind::Vertical;
  return HandleKind::Straight;
}

FaithfulProjection::FaithfulProjection(TorusSpec spec, ProjectionVariant variant)
    : spec_(spec), variant_(variant) {}

int FaithfulProjection::winding(int undirected) const noexcept {
  switch (handle_kind(spec_, undirected)) {
    case HandleKind::Straight: return 0;
    case HandleKind::Vertical: return -1;
    case HandleKind::Horizontal: return variant_ == ProjectionVariant::G1 ? -1 : -2;
    case HandleKind::Corner: return variant_ == ProjectionVariant::G1 ? -2 : -1;
  }
  return 0;
}

bool FaithfulProjection::self_crossing(int undirected) const noexcept {
  const HandleKind k = handle_kind(spec_, undirected);
  if (variant_ == ProjectionVariant::G1) return k == HandleKind::Corner;
  return k == HandleKind::Horizontal;
}

bool FaithfulProjection::crosses(int u, int v) const noexcept {
  if (u == v) return false;
  const HandleKind a = handle_kind(spec_, u);
  const HandleKind b = handle_kind(spec_, v);
  const auto top = [](HandleKind k) { return k == HandleKind::Vertical || k == HandleKind::Corner; };
  const auto right = [](HandleKind k) { return k == HandleKind::Horizontal || k == HandleKind::Corner; };
  return (top(a) && right(b)) || (right(a) && top(b));
}

double FaithfulProjection::integrated_angle(const DirectedEdge& e) const noexcept {
  return 2.0 * std::numbers::pi * winding(undirected_index(spec_, e));
}

int FaithfulProjection::half_angle_sign(const DirectedEdge& e) const noexcept {
  return (winding(undirected_index(spec_, e)) & 1) ? -1 : 1;
}

bool fits_mask(const TorusSpec& spec) noexcept { return spec.undirected_edges() <= kMaxMaskEdges; }

namespace {

std::array<int, 2> edge_ends(const TorusSpec& spec, int u) {
  const int s = u / 3;
  const auto dir = std::array{Direction::E, Direction::N, Direction::NE}[u % 3];
  const DirectedEdge e{{s % spec.L(), s / spec.L()}, dir};
  return {s, site_index(spec, endpoint(spec, e))};
}

void require_mask(const TorusSpec& spec) {
  if (!fits_mask(spec)) {
    throw SizeExceeded("edge bitmask holds at most 64 edges (3LM <= 64)");
  }
}

}  // namespace

bool is_even(const TorusSpec& spec, EdgeMask mask) {
  require_mask(spec);
  std::vector<int> degree(static_cast<std::size_t>(spec.sites()), 0);
  for (int u = 0; u < spec.undirected_edges(); ++u) {
    if (!((mask >> u) & 1U)) continue;
    const auto [a, b] = edge_ends(spec, u);
    ++degree[a];
    ++degree[b];
  }
  for (int d : degree) {
    if (d % 2) return false;
  }
  return true;
}

EvenSubgraph::EvenSubgraph(const TorusSpec& spec, EdgeMask mask) : spec_(spec), mask_(mask) {
  require_mask(spec);
  if (spec.undirected_edges() < 64 && (mask >> spec.undirected_edges()) != 0) {
    throw std::invalid_argument("mask has bits beyond the edge count");
  }
  if (!is_even(spec, mask)) {
    throw std::invalid_argument("subgraph has a vertex of odd degree");
  }
}

int crossing_count(const FaithfulProjection& p, const EvenSubgraph& g) {
  const int n = p.spec().undirected_edges();
  int count = 0;
  for (int u = 0; u < n; ++u) {
    if (!g.contains(u)) continue;
    if (p.self_crossing(u)) ++count;
    for (int v = u + 1; v < n; ++v) {
      if (g.contains(v) && p.crosses(u, v)) ++count;
    }
  }
  return count;
}

HandleMasks handle_masks(const TorusSpec& spec) {
  require_mask(spec);
  HandleMasks m;
  for (int u = 0; u < spec.undirected_edges(); ++u) {
    const EdgeMask bit = EdgeMask{1} << u;
    m.by_class[u % 3] |= bit;
    switch (handle_kind(spec, u)) {
      case HandleKind::Horizontal: m.horizontal |= bit; break;
      case HandleKind::Vertical: m.vertical |= bit; break;
      case HandleKind::Corner: m.corner |= bit; break;
      case HandleKind::Straight: break;
    }
  }
  return m;
}

HandleStats handle_stats(const EvenSubgraph& g) {
  const HandleMasks m = handle_masks(g.spec());
  const EdgeMask e = g.edges();
  HandleStats s;
  s.n_hv = std::popcount(e & m.corner);
  s.n_h = std::popcount(e & m.horizontal) + s.n_hv;
  s.n_v = std::popcount(e & m.vertical);
  return s;
}

int crossing_count_from_stats(ProjectionVariant v, const HandleStats& s) noexcept {
  const int top = s.n_v + s.n_hv;
  const int right = s.n_h;
  const int pairs = top * right - s.n_hv;
  const int self = v == ProjectionVariant::G1 ? s.n_hv : s.n_h - s.n_hv;
  return pairs + self;
}

std::vector<EdgeMask> cycle_space_basis(const TorusSpec& spec) {
  require_mask(spec);
  const int nv = spec.sites();
  const int ne = spec.undirected_edges();
  std::vector<std::vector<std::array<int, 2>>> adj(static_cast<std::size_t>(nv));
  for (int u = 0; u < ne; ++u) {
    const auto [a, b] = edge_ends(spec, u);
    adj[a].push_back({b, u});
    adj[b].push_back({a, u});
  }
  // BFS tree; path_to_root[x] is the mask of tree edges from x to the root.
  std::vector<EdgeMask> path_to_root(static_cast<std::size_t>(nv), 0);
  std::vector<bool> seen(static_cast<std::size_t>(nv), false);
  EdgeMask tree = 0;
  std::deque<int> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop_front();
    for (const auto& [y, u] : adj[x]) {
      if (seen[y]) continue;
      seen[y] = true;
      tree |= EdgeMask{1} << u;
      path_to_root[y] = path_to_root[x] ^ (EdgeMask{1} << u);
      queue.push_back(y);
    }
  }
  std::vector<EdgeMask> basis;
  basis.reserve(static_cast<std::size_t>(ne - nv + 1));
  for (int u = 0; u < ne; ++u) {
    if ((tree >> u) & 1U) continue;
    const auto [a, b] = edge_ends(spec, u);
    basis.push_back((EdgeMask{1} << u) ^ path_to_root[a] ^ path_to_root[b]);
  }
  return basis;
}

EdgeMask horizontal_ring(const TorusSpec& spec, int j) {
  require_mask(spec);
  EdgeMask m = 0;
  for (int i = 0; i < spec.L(); ++i) m |= EdgeMask{1} << (3 * site_index(spec, {i, j}));
  return m;
}

EdgeMask vertical_ring(const TorusSpec& spec, int i) {
  require_mask(spec);
  EdgeMask m = 0;
  for (int j = 0; j < spec.M(); ++j) m |= EdgeMask{1} << (3 * site_index(spec, {i, j}) + 1);
  return m;
}

EdgeMask oblique_ring(const TorusSpec& spec) {
  require_mask(spec);
  EdgeMask m = 0;
  Site s{0, 0};
  do {
    m ^= EdgeMask{1} << (3 * site_index(spec, s) + 2);
    s = wrap(spec, {s.i + 1, s.j + 1});
  } while (!(s == Site{0, 0}));
  return m;
}

}  // namespace kwising
