#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace kwising {

/// L x M torus of the triangular lattice: square lattice plus North-East
/// diagonals. Sites are 0-based (i, j), i along the horizontal extent L.
class TorusSpec {
 public:
  /// Throws std::invalid_argument unless L >= 2 and M >= 2.
  TorusSpec(int L, int M);

  int L() const noexcept { return L_; }
  int M() const noexcept { return M_; }
  int sites() const noexcept { return L_ * M_; }
  int undirected_edges() const noexcept { return 3 * L_ * M_; }
  int directed_edges() const noexcept { return 6 * L_ * M_; }

  friend bool operator==(const TorusSpec&, const TorusSpec&) = default;

 private:
  int L_;
  int M_;
};

/// Horizontal J1, vertical J2, oblique (North-East) J3. Any sign.
struct Couplings {
  double J1 = 0.0;
  double J2 = 0.0;
  double J3 = 0.0;

  /// Throws std::invalid_argument on non-finite input.
  static Couplings make(double J1, double J2, double J3);

  Couplings scaled(double beta) const noexcept { return {beta * J1, beta * J2, beta * J3}; }
  double max_abs() const noexcept;
  std::array<double, 3> as_array() const noexcept { return {J1, J2, J3}; }

  friend bool operator==(const Couplings&, const Couplings&) = default;
};

enum class EdgeClass : std::uint8_t { Horizontal = 0, Vertical = 1, Oblique = 2 };

// Order matches the rows/columns of the 6x6 local turning-phase block.
enum class Direction : std::uint8_t { E = 0, W = 1, N = 2, S = 3, NE = 4, SW = 5 };

inline constexpr std::array<Direction, 6> kDirections = {
    Direction::E, Direction::W, Direction::N, Direction::S, Direction::NE, Direction::SW};

constexpr Direction reverse(Direction d) noexcept {
  return static_cast<Direction>(static_cast<std::uint8_t>(d) ^ 1U);
}

constexpr EdgeClass edge_class(Direction d) noexcept {
  return static_cast<EdgeClass>(static_cast<std::uint8_t>(d) >> 1U);
}

/// Lattice step (di, dj) of a direction.
constexpr std::array<int, 2> offset(Direction d) noexcept {
  switch (d) {
    case Direction::E: return {1, 0};
    case Direction::W: return {-1, 0};
    case Direction::N: return {0, 1};
    case Direction::S: return {0, -1};
    case Direction::NE: return {1, 1};
    case Direction::SW: return {-1, -1};
  }
  return {0, 0};
}

std::string_view name(Direction d) noexcept;

struct Site {
  int i = 0;
  int j = 0;
  friend bool operator==(const Site&, const Site&) = default;
};

/// A directed edge, identified by its starting site and direction.
struct DirectedEdge {
  Site site;
  Direction dir = Direction::E;
  friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

int site_index(const TorusSpec& spec, Site s) noexcept;
Site wrap(const TorusSpec& spec, Site s) noexcept;

/// flat = 6 * (i + L j) + dir; a bijection onto [0, 6LM).
int flatten(const TorusSpec& spec, const DirectedEdge& e) noexcept;
DirectedEdge unflatten(const TorusSpec& spec, int flat);

Site endpoint(const TorusSpec& spec, const DirectedEdge& e) noexcept;

/// Undirected edge index 3 * site + class, where site is the tail of the E, N
/// or NE representative. Both orientations of an edge map to the same index.
int undirected_index(const TorusSpec& spec, const DirectedEdge& e) noexcept;

double coupling_of(const DirectedEdge& e, const Couplings& J) noexcept;
double coupling_of(EdgeClass c, const Couplings& J) noexcept;

/// endpoint(e) == start(f) and f is not the reversal of e.
bool is_consecutive(const TorusSpec& spec, const DirectedEdge& e, const DirectedEdge& f) noexcept;

/// Signed turning angle from a to b in units of pi/8, in (-8, 8].
/// Throws std::invalid_argument when b == reverse(a).
int turning_angle_eighths(Direction a, Direction b);

/// Signed turning angle in radians, in (-pi, pi).
double turning_angle(Direction a, Direction b);

}  // namespace kwising
