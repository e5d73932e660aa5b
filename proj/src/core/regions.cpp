#include "core/regions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace coherence {

namespace {

double distance(Point a, Point b) { return std::hypot(a.z - b.z, a.r - b.r); }

double cross(Point o, Point a, Point b) {
  return (a.z - o.z) * (b.r - o.r) - (a.r - o.r) * (b.z - o.z);
}

// One piece of a closed boundary curve, parameterized by its own arc length.
struct Piece {
  double length = 0.0;
  std::function<Point(double)> at;  // argument in [0, length]
};

// Ellipse arc z' = cos t, r' = e sin t for t in [t0, t1]. Positions are
// evaluated on the exact curve; only the arc-length -> t map is tabulated.
Piece ellipse_arc(double e, double t0, double t1) {
  constexpr int kSteps = 4096;
  auto speed = [e](double t) { return std::hypot(std::sin(t), e * std::cos(t)); };
  std::vector<double> cum(kSteps + 1, 0.0);
  const double h = (t1 - t0) / kSteps;
  for (int k = 0; k < kSteps; ++k) {
    const double a = t0 + k * h;
    // Simpson on each cell.
    cum[k + 1] = cum[k] + h / 6.0 * (speed(a) + 4.0 * speed(a + 0.5 * h) + speed(a + h));
  }
  Piece p;
  p.length = cum.back();
  p.at = [cum = std::move(cum), e, t0, h](double s) {
    const auto it = std::upper_bound(cum.begin(), cum.end(), s);
    std::size_t k = it == cum.begin() ? 0 : static_cast<std::size_t>(it - cum.begin()) - 1;
    k = std::min<std::size_t>(k, cum.size() - 2);
    const double span = cum[k + 1] - cum[k];
    const double frac = span > 0 ? (s - cum[k]) / span : 0.0;
    const double t = t0 + (static_cast<double>(k) + std::clamp(frac, 0.0, 1.0)) * h;
    return Point{std::cos(t), e * std::sin(t)};
  };
  return p;
}

Piece segment(Point a, Point b) {
  Piece p;
  p.length = distance(a, b);
  p.at = [a, b, len = p.length](double s) {
    const double f = len > 0 ? std::clamp(s / len, 0.0, 1.0) : 0.0;
    return Point{a.z + f * (b.z - a.z), a.r + f * (b.r - a.r)};
  };
  return p;
}

std::vector<Point> sample_closed_curve(const std::vector<Piece>& pieces, std::size_t n) {
  double total = 0.0;
  for (const auto& p : pieces) total += p.length;
  std::vector<Point> out;
  out.reserve(n);
  std::size_t idx = 0;
  double offset = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = total * static_cast<double>(k) / static_cast<double>(n);
    while (idx + 1 < pieces.size() && s > offset + pieces[idx].length) {
      offset += pieces[idx].length;
      ++idx;
    }
    out.push_back(pieces[idx].at(s - offset));
  }
  return out;
}

RegionReport polygon_contains(const std::vector<HexVertex>& poly, Point to) {
  RegionReport rep;
  if (poly.size() == 2) {
    // Segment: nothing is strictly inside, so the margin is minus the distance.
    const Point a = poly[0].p, b = poly[1].p;
    const double len2 = (b.z - a.z) * (b.z - a.z) + (b.r - a.r) * (b.r - a.r);
    const double f = std::clamp(((to.z - a.z) * (b.z - a.z) + (to.r - a.r) * (b.r - a.r)) / len2, 0.0, 1.0);
    rep.margin = -distance(to, {a.z + f * (b.z - a.z), a.r + f * (b.r - a.r)});
    rep.binding = BindingConstraint::Degenerate;
  } else {
    rep.margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point a = poly[i].p;
      const Point b = poly[(i + 1) % poly.size()].p;
      const double slack = cross(a, b, to) / distance(a, b);
      if (slack < rep.margin) {
        rep.margin = slack;
        rep.edge_index = static_cast<int>(i);
      }
    }
    rep.binding = BindingConstraint::HexagonEdge;
  }
  rep.verdict = rep.margin >= -kTol;
  return rep;
}

}  // namespace

const char* to_string(BindingConstraint b) {
  switch (b) {
    case BindingConstraint::Ellipse: return "Ellipse";
    case BindingConstraint::CoherenceBound: return "CoherenceBound";
    case BindingConstraint::HexagonEdge: return "HexagonEdge";
    case BindingConstraint::OrbitPoint: return "OrbitPoint";
    case BindingConstraint::Degenerate: return "Degenerate";
  }
  return "Unknown";
}

RegionReport io_region_contains(Point from, Point to) {
  const double r2 = from.r * from.r;
  const double scale = std::max(r2, 1.0);
  // Ellipse cleared of its r^2 denominator so r = 0 needs no special case.
  const double ellipse = (r2 - (to.z * to.z * r2 + (1.0 - from.z * from.z) * to.r * to.r)) / scale;
  const double bound = (std::abs(from.r) - std::abs(to.r)) / scale;

  RegionReport rep;
  rep.margin = std::min(ellipse, bound);
  if (std::abs(from.r) < kTol) {
    rep.binding = BindingConstraint::Degenerate;
  } else {
    rep.binding = ellipse <= bound ? BindingConstraint::Ellipse : BindingConstraint::CoherenceBound;
  }
  rep.verdict = rep.margin >= -kTol;
  return rep;
}

std::vector<Point> io_region_boundary(Point from, std::size_t n) {
  if (n < 4) throw Error(ErrorCode::InvalidArgument, "boundary needs at least 4 points");
  if (std::abs(from.r) < kTol) {
    throw Error(ErrorCode::DegenerateRegion, "region of an incoherent source is the segment r' = 0");
  }
  const double a = std::abs(from.z);
  const double b = std::abs(from.r);
  const double c = std::sqrt(std::max(0.0, 1.0 - from.z * from.z));
  const double e = b / c;  // semi-axis along r'
  // The arcs meet the lines |r'| = |r| where sin t = c, i.e. z' = +-|z|.
  const double t0 = std::asin(std::min(1.0, c));
  constexpr double pi = std::numbers::pi;

  std::vector<Piece> pieces;
  pieces.push_back(ellipse_arc(e, 0.0, t0));
  pieces.push_back(segment({a, b}, {-a, b}));
  pieces.push_back(ellipse_arc(e, pi - t0, pi + t0));
  pieces.push_back(segment({-a, -b}, {a, -b}));
  pieces.push_back(ellipse_arc(e, 2.0 * pi - t0, 2.0 * pi));
  return sample_closed_curve(pieces, n);
}

std::vector<Point> cpo_orbit(Point from) {
  const std::vector<Point> all = {{from.z, from.r}, {from.z, -from.r}, {-from.z, from.r}, {-from.z, -from.r}};
  std::vector<Point> out;
  for (const auto& p : all) {
    const bool dup = std::any_of(out.begin(), out.end(), [&](Point q) { return distance(p, q) <= kTol; });
    if (!dup) out.push_back(p);
  }
  return out;
}

RegionReport cpo_reachable(Point from, Point to) {
  RegionReport rep;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : cpo_orbit(from)) best = std::min(best, distance(p, to));
  rep.margin = -best;
  rep.binding = BindingConstraint::OrbitPoint;
  rep.verdict = rep.margin >= -kTol;
  return rep;
}

Hexagon pio_region_vertices(Point from) {
  const double a = std::abs(from.z);
  const double b = std::abs(from.r);
  const double zs = from.z >= 0 ? 1.0 : -1.0;
  const double rs = from.r >= 0 ? 1.0 : -1.0;
  // Corner (sz*a, sr*b) is the image of the source under a swap when sz
  // disagrees with the sign of z, and under an r-flip when sr disagrees with r.
  auto corner = [&](double sz, double sr) {
    HexVertex v;
    v.p = {sz * a, sr * b};
    v.family = sz == zs ? PioFamily::K5 : PioFamily::K6;
    v.flips_r = sr != rs;
    return v;
  };
  const HexVertex up{{1.0, 0.0}, PioFamily::K3, false};
  const HexVertex down{{-1.0, 0.0}, PioFamily::K4, false};

  Hexagon h;
  if (b < kTol || a > 1.0 - kTol) {
    h.vertices = {up, down};
  } else if (a < kTol) {
    h.vertices = {up, corner(zs, 1.0), down, corner(zs, -1.0)};
  } else {
    h.vertices = {up, corner(1.0, 1.0), corner(-1.0, 1.0), down, corner(-1.0, -1.0), corner(1.0, -1.0)};
  }
  return h;
}

RegionReport pio_region_contains(Point from, Point to) {
  return polygon_contains(pio_region_vertices(from).vertices, to);
}

std::vector<Point> pio_region_boundary(Point from, std::size_t n) {
  if (n < 4) throw Error(ErrorCode::InvalidArgument, "boundary needs at least 4 points");
  const auto& v = pio_region_vertices(from).vertices;
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < v.size(); ++i) pieces.push_back(segment(v[i].p, v[(i + 1) % v.size()].p));
  return sample_closed_curve(pieces, n);
}

RegionReport region_contains(ClassKind kind, Point from, Point to) {
  switch (kind) {
    case ClassKind::IO:
    case ClassKind::SIO: return io_region_contains(from, to);
    case ClassKind::PIO: return pio_region_contains(from, to);
    case ClassKind::CPO: return cpo_reachable(from, to);
    default: break;
  }
  throw Error(ErrorCode::UnsupportedClass, std::string("no transformation region for class ") + to_string(kind));
}

}  // namespace coherence
