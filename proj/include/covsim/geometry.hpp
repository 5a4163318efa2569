#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace covsim {

/// Absolute tolerance for point coincidence and collinearity tests (meters).
/// Domain extents stay below ~200 m, so doubles have ample headroom here.
inline constexpr double kGeomTol = 1e-9;

/// Slack used when classifying a vertex as inside a half-plane during clipping.
inline constexpr double kClipEps = 1e-12;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline Point2 operator*(Point2 p, double s) { return {s * p.x, s * p.y}; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Point2 p) { return p.x * p.x + p.y * p.y; }
inline double norm(Point2 p) { return std::sqrt(norm2(p)); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Directed line; the "kept" side is {q : dot(q - point, normal) <= 0}.
struct HalfPlane {
  Point2 point;
  Point2 normal;
};

/// Counter-clockwise convex polygon with at least three vertices.
class ConvexPolygon {
 public:
  ConvexPolygon() = default;

  /// Validates orientation, convexity (up to collinearity tolerance) and
  /// rejects repeated consecutive vertices. Throws std::invalid_argument.
  static ConvexPolygon from_vertices(std::vector<Point2> verts) {
    if (verts.size() < 3) {
      throw std::invalid_argument("polygon needs at least 3 vertices");
    }
    for (const Point2& p : verts) {
      if (!finite(p)) throw std::invalid_argument("polygon vertex is not finite");
    }
    const std::size_t n = verts.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (distance(verts[i], verts[(i + 1) % n]) <= kGeomTol) {
        throw std::invalid_argument("polygon has repeated consecutive vertices");
      }
    }
    double twice_area = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      twice_area += cross(verts[i], verts[(i + 1) % n]);
    }
    if (twice_area <= 0.0) {
      throw std::invalid_argument("polygon must be counter-clockwise with positive area");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 e0 = verts[(i + 1) % n] - verts[i];
      const Point2 e1 = verts[(i + 2) % n] - verts[(i + 1) % n];
      if (cross(e0, e1) < -kGeomTol * norm(e0) * norm(e1)) {
        throw std::invalid_argument("polygon is not convex");
      }
    }
    ConvexPolygon poly;
    poly.verts_ = std::move(verts);
    return poly;
  }

  static ConvexPolygon rectangle(double x0, double y0, double x1, double y1) {
    return from_vertices({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
  }

  const std::vector<Point2>& vertices() const { return verts_; }
  std::size_t size() const { return verts_.size(); }

  double area() const {
    double twice = 0.0;
    const std::size_t n = verts_.size();
    for (std::size_t i = 0; i < n; ++i) {
      twice += cross(verts_[i], verts_[(i + 1) % n]);
    }
    return 0.5 * twice;
  }

  /// Exact area centroid (uniform density) via the shoelace decomposition.
  Point2 centroid() const {
    const std::size_t n = verts_.size();
    double a2 = 0.0;
    Point2 c{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      const Point2& p = verts_[i];
      const Point2& q = verts_[(i + 1) % n];
      const double w = cross(p, q);
      a2 += w;
      c.x += (p.x + q.x) * w;
      c.y += (p.y + q.y) * w;
    }
    return {c.x / (3.0 * a2), c.y / (3.0 * a2)};
  }

  bool contains(Point2 q, double tol = kGeomTol) const {
    const std::size_t n = verts_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 e = verts_[(i + 1) % n] - verts_[i];
      if (cross(e, q - verts_[i]) < -tol * (norm(e) + 1.0)) return false;
    }
    return true;
  }

  /// Nearest point of the (closed) polygon; identity for interior points.
  Point2 clamp_inside(Point2 q) const {
    if (contains(q, 0.0)) return q;
    double best_d2 = std::numeric_limits<double>::infinity();
    Point2 best = verts_[0];
    const std::size_t n = verts_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 a = verts_[i];
      const Point2 b = verts_[(i + 1) % n];
      const Point2 ab = b - a;
      double t = dot(q - a, ab) / norm2(ab);
      t = std::fmax(0.0, std::fmin(1.0, t));
      const Point2 proj = a + t * ab;
      const double d2 = norm2(q - proj);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = proj;
      }
    }
    return best;
  }

  // Internal fast path for clip results; skips validation.
  static ConvexPolygon unchecked(std::vector<Point2> verts) {
    ConvexPolygon poly;
    poly.verts_ = std::move(verts);
    return poly;
  }

 private:
  std::vector<Point2> verts_;
};

/// Clips `poly` against a closed half-plane (Sutherland-Hodgman, single edge).
/// Returns std::nullopt when the intersection is empty or degenerate.
inline std::optional<ConvexPolygon> halfplane_clip(const ConvexPolygon& poly,
                                                   const HalfPlane& hp) {
  const double nlen = norm(hp.normal);
  if (!(nlen > 1e-15) || !finite(hp.normal) || !finite(hp.point)) {
    throw std::invalid_argument("halfplane_clip: degenerate normal");
  }
  const Point2 unit{hp.normal.x / nlen, hp.normal.y / nlen};

  const auto& vs = poly.vertices();
  const std::size_t n = vs.size();
  std::vector<Point2> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 cur = vs[i];
    const Point2 nxt = vs[(i + 1) % n];
    const double s0 = dot(cur - hp.point, unit);
    const double s1 = dot(nxt - hp.point, unit);
    const bool in0 = s0 <= kClipEps;
    const bool in1 = s1 <= kClipEps;
    if (in0) out.push_back(cur);
    if (in0 != in1) {
      const double t = s0 / (s0 - s1);
      out.push_back(cur + t * (nxt - cur));
    }
  }
  // Drop near-duplicate consecutive vertices introduced by edge crossings.
  std::vector<Point2> dedup;
  dedup.reserve(out.size());
  for (const Point2& p : out) {
    if (dedup.empty() || distance(dedup.back(), p) > kGeomTol) dedup.push_back(p);
  }
  while (dedup.size() > 1 && distance(dedup.front(), dedup.back()) <= kGeomTol) {
    dedup.pop_back();
  }
  if (dedup.size() < 3) return std::nullopt;
  ConvexPolygon result = ConvexPolygon::unchecked(std::move(dedup));
  if (result.area() <= 0.0) return std::nullopt;
  return result;
}

struct WeightedSite {
  Point2 position;
  double weight = 0.0;  // m^2, subtracted from the squared distance
};

/// One robot's assigned region. Geometry is filled by compute_power_diagram;
/// mass/centroid stay zero/empty until cell_moments runs.
struct PowerCell {
  int owner = -1;
  std::optional<ConvexPolygon> polygon;
  double area = 0.0;
  double mass = 0.0;
  std::optional<Point2> centroid;
};

/// Power diagram (weighted Voronoi) clipped to a convex domain.
///
/// Each cell is the intersection of the domain with the half-planes
/// ||q-p_i||^2 - w_i <= ||q-p_j||^2 - w_j over all j != i, built by iterated
/// clipping against the pairwise radical axes. Coincident sites are resolved
/// deterministically: higher weight wins, ties go to the lower id.
inline std::vector<PowerCell> compute_power_diagram(std::span<const WeightedSite> sites,
                                                    const ConvexPolygon& domain) {
  if (sites.empty()) {
    throw std::invalid_argument("compute_power_diagram: need at least one site");
  }
  for (const WeightedSite& s : sites) {
    if (!finite(s.position) || !std::isfinite(s.weight)) {
      throw std::invalid_argument("compute_power_diagram: non-finite site");
    }
  }
  const int n = static_cast<int>(sites.size());
  std::vector<PowerCell> cells(sites.size());
  for (int i = 0; i < n; ++i) {
    cells[i].owner = i;
    std::optional<ConvexPolygon> poly = domain;
    for (int j = 0; j < n && poly; ++j) {
      if (j == i) continue;
      const Point2 u = sites[j].position - sites[i].position;
      const double d2 = norm2(u);
      if (d2 <= kGeomTol * kGeomTol) {
        // Coincident sites: the bisector degenerates to the whole plane.
        const double wi = sites[i].weight;
        const double wj = sites[j].weight;
        if (wj > wi || (wj == wi && j < i)) poly.reset();
        continue;
      }
      const Point2 mid = 0.5 * (sites[i].position + sites[j].position);
      const Point2 on_axis = mid + ((sites[i].weight - sites[j].weight) / (2.0 * d2)) * u;
      poly = halfplane_clip(*poly, HalfPlane{on_axis, u});
    }
    cells[i].polygon = std::move(poly);
    cells[i].area = cells[i].polygon ? cells[i].polygon->area() : 0.0;
  }
  return cells;
}

}  // namespace covsim
