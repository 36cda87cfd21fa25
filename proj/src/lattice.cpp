#include "kwising/lattice.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kwising {

namespace {

// Heading of each direction in units of pi/8, measured counter-clockwise from E.
constexpr std::array<int, 6> kHeadingEighths = {0, 8, 4, 12, 2, 10};

int mod(int a, int n) noexcept {
  const int r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace

TorusSpec::TorusSpec(int L, int M) : L_(L), M_(M) {
  if (L < 2 || M < 2) {
    throw std::invalid_argument("torus extents must satisfy L >= 2 and M >= 2, got " +
                                std::to_string(L) + "x" + std::to_string(M));
  }
}

Couplings Couplings::make(double J1, double J2, double J3) {
  if (!std::isfinite(J1) || !std::isfinite(J2) || !std::isfinite(J3)) {
    throw std::invalid_argument("couplings must be finite");
  }
  return {J1, J2, J3};
}

double Couplings::max_abs() const noexcept {
  return std::max({std::abs(J1), std::abs(J2), std::abs(J3)});
}

std::string_view name(Direction d) noexcept {
  switch (d) {
    case Direction::E: return "E";
    case Direction::W: return "W";
    case Direction::N: return "N";
    case Direction::S: return "S";
    case Direction::NE: return "NE";
    case Direction::SW: return "SW";
  }
  return "?";
}

int site_index(const TorusSpec& spec, Site s) noexcept {
  return mod(s.i, spec.L()) + spec.L() * mod(s.j, spec.M());
}

Site wrap(const TorusSpec& spec, Site s) noexcept { return {mod(s.i, spec.L()), mod(s.j, spec.M())}; }

int flatten(const TorusSpec& spec, const DirectedEdge& e) noexcept {
  return 6 * site_index(spec, e.site) + static_cast<int>(e.dir);
}

DirectedEdge unflatten(const TorusSpec& spec, int flat) {
  if (flat < 0 || flat >= spec.directed_edges()) {
    throw std::out_of_range("directed edge index out of range");
  }
  const int s = flat / 6;
  return {{s % spec.L(), s / spec.L()}, static_cast<Direction>(flat % 6)};
}

Site endpoint(const TorusSpec& spec, const DirectedEdge& e) noexcept {
  const auto d = offset(e.dir);
  return wrap(spec, {e.site.i + d[0], e.site.j + d[1]});
}

int undirected_index(const TorusSpec& spec, const DirectedEdge& e) noexcept {
  const auto cls = static_cast<int>(edge_class(e.dir));
  const bool forward = (static_cast<int>(e.dir) & 1) == 0;
  const Site tail = forward ? wrap(spec, e.site) : endpoint(spec, e);
  return 3 * site_index(spec, tail) + cls;
}

double coupling_of(EdgeClass c, const Couplings& J) noexcept {
  switch (c) {
    case EdgeClass::Horizontal: return J.J1;
    case EdgeClass::Vertical: return J.J2;
    case EdgeClass::Oblique: return J.J3;
  }
  return 0.0;
}

double coupling_of(const DirectedEdge& e, const Couplings& J) noexcept {
  return coupling_of(edge_class(e.dir), J);
}

bool is_consecutive(const TorusSpec& spec, const DirectedEdge& e, const DirectedEdge& f) noexcept {
  if (f.dir == reverse(e.dir)) return false;
  return endpoint(spec, e) == wrap(spec, f.site);
}

int turning_angle_eighths(Direction a, Direction b) {
  if (b == reverse(a)) {
    throw std::invalid_argument("turning angle undefined for a backtracking step");
  }
  int d = mod(kHeadingEighths[static_cast<int>(b)] - kHeadingEighths[static_cast<int>(a)], 16);
  if (d > 8) d -= 16;
  return d;
}

double turning_angle(Direction a, Direction b) {
  return turning_angle_eighths(a, b) * std::numbers::pi / 8.0;
}

}  // namespace kwising
