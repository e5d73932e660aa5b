#pragma once

#include <cstddef>
#include <vector>

#include "core/channels.hpp"
#include "core/qubit.hpp"

namespace coherence {

// Reachability predicates work in the (z, r) plane; phases never matter
// because every class is closed under diagonal-unitary conjugation.

enum class BindingConstraint { Ellipse, CoherenceBound, HexagonEdge, OrbitPoint, Degenerate };

const char* to_string(BindingConstraint b);

struct RegionReport {
  bool verdict = false;
  // Signed slack, positive strictly inside. Only the sign is contractual.
  double margin = 0.0;
  BindingConstraint binding = BindingConstraint::Degenerate;
  int edge_index = -1;  // HexagonEdge only
};

// A hexagon corner together with the PIO family realizing it.
struct HexVertex {
  Point p;
  PioFamily family = PioFamily::K5;
  bool flips_r = false;  // K5/K6 phase choice {0, pi} instead of {0, 0}
};

// Counterclockwise, starting at (1, 0), duplicates and collinear corners
// removed. Two vertices means the degenerate segment r' = 0.
struct Hexagon {
  std::vector<HexVertex> vertices;
};

// z'^2 r^2 + (1 - z^2) r'^2 <= r^2 and |r'| <= |r|
RegionReport io_region_contains(Point from, Point to);
std::vector<Point> io_region_boundary(Point from, std::size_t n);

std::vector<Point> cpo_orbit(Point from);
RegionReport cpo_reachable(Point from, Point to);

Hexagon pio_region_vertices(Point from);
RegionReport pio_region_contains(Point from, Point to);
// n points spaced evenly along the hexagon perimeter.
std::vector<Point> pio_region_boundary(Point from, std::size_t n);

// IO and SIO share one region. Throws UnsupportedClass otherwise.
RegionReport region_contains(ClassKind kind, Point from, Point to);

inline RegionReport io_region_contains(const BlochState& from, const BlochState& to) {
  return io_region_contains(plane_point(from), plane_point(to));
}
inline RegionReport cpo_reachable(const BlochState& from, const BlochState& to) {
  return cpo_reachable(plane_point(from), plane_point(to));
}
inline RegionReport pio_region_contains(const BlochState& from, const BlochState& to) {
  return pio_region_contains(plane_point(from), plane_point(to));
}

}  // namespace coherence
