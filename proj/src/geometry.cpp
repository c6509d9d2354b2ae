#include "eit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eit {

namespace {

constexpr Scalar kCollinearEps = 1e-14;
constexpr Scalar kRepeatedVertexEps = 1e-14;
constexpr Scalar kAreaEps = 1e-14;

// Extra clearances enforced on vertex updates so the step-halving guard also
// protects the downstream triangulation, not only exact validity.
constexpr Scalar kBoundaryMargin = 0.01;
constexpr Scalar kPairClearance = 1e-6;
constexpr Scalar kSelfClearance = 1e-9;

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& q) {
  // assumes q collinear with a,b
  return q.x() >= std::min(a.x(), b.x()) - kCollinearEps &&
         q.x() <= std::max(a.x(), b.x()) + kCollinearEps &&
         q.y() >= std::min(a.y(), b.y()) - kCollinearEps &&
         q.y() <= std::max(a.y(), b.y()) + kCollinearEps;
}

// True when segments p1p2 and p3p4 share any point (touching counts).
bool segments_touch(const Vec2& p1, const Vec2& p2, const Vec2& p3,
                    const Vec2& p4) {
  const Scalar d1 = orient2d(p3, p4, p1);
  const Scalar d2 = orient2d(p3, p4, p2);
  const Scalar d3 = orient2d(p1, p2, p3);
  const Scalar d4 = orient2d(p1, p2, p4);
  if (((d1 > kCollinearEps && d2 < -kCollinearEps) ||
       (d1 < -kCollinearEps && d2 > kCollinearEps)) &&
      ((d3 > kCollinearEps && d4 < -kCollinearEps) ||
       (d3 < -kCollinearEps && d4 > kCollinearEps)))
    return true;
  if (std::abs(d1) <= kCollinearEps && on_segment(p3, p4, p1)) return true;
  if (std::abs(d2) <= kCollinearEps && on_segment(p3, p4, p2)) return true;
  if (std::abs(d3) <= kCollinearEps && on_segment(p1, p2, p3)) return true;
  if (std::abs(d4) <= kCollinearEps && on_segment(p1, p2, p4)) return true;
  return false;
}

Scalar point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const Scalar len2 = ab.squaredNorm();
  if (len2 == 0) return (p - a).norm();
  const Scalar t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

Scalar segment_segment_distance(const Vec2& p1, const Vec2& p2, const Vec2& p3,
                                const Vec2& p4) {
  if (segments_touch(p1, p2, p3, p4)) return 0;
  return std::min({point_segment_distance(p1, p3, p4),
                   point_segment_distance(p2, p3, p4),
                   point_segment_distance(p3, p1, p2),
                   point_segment_distance(p4, p1, p2)});
}

Scalar polygon_pair_distance(const Polygon& a, const Polygon& b) {
  Scalar d = std::numeric_limits<Scalar>::infinity();
  const int na = static_cast<int>(a.vertices.size());
  const int nb = static_cast<int>(b.vertices.size());
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j)
      d = std::min(d, segment_segment_distance(
                          a.vertices[i], a.vertices[(i + 1) % na],
                          b.vertices[j], b.vertices[(j + 1) % nb]));
  return d;
}

// Minimum distance between non-adjacent edges of the same polygon.
Scalar self_clearance(const Polygon& p) {
  const int n = static_cast<int>(p.vertices.size());
  Scalar d = std::numeric_limits<Scalar>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      d = std::min(d, segment_segment_distance(
                          p.vertices[i], p.vertices[(i + 1) % n],
                          p.vertices[j], p.vertices[(j + 1) % n]));
    }
  }
  return d;
}

PolygonCheck partition_validate_impl(const Partition& part, Scalar margin,
                                     Scalar pair_clearance,
                                     Scalar self_clear) {
  for (size_t i = 0; i < part.inclusions.size(); ++i) {
    PolygonCheck c = polygon_validate(part.inclusions[i]);
    if (!c.ok) {
      c.reason = "inclusion " + std::to_string(i) + ": " + c.reason;
      return c;
    }
    for (const Vec2& v : part.inclusions[i].vertices) {
      if (v.x() <= margin || v.x() >= 1.0 - margin || v.y() <= margin ||
          v.y() >= 1.0 - margin)
        return {false, "inclusion " + std::to_string(i) +
                           " not strictly inside the unit square"};
    }
    if (self_clear > 0 && self_clearance(part.inclusions[i]) < self_clear)
      return {false,
              "inclusion " + std::to_string(i) + " nearly self-touching"};
  }
  for (size_t i = 0; i < part.inclusions.size(); ++i) {
    for (size_t j = i + 1; j < part.inclusions.size(); ++j) {
      const Polygon& a = part.inclusions[i];
      const Polygon& b = part.inclusions[j];
      if (point_in_polygon(a, b.vertices[0]) ||
          point_in_polygon(b, a.vertices[0]))
        return {false, "inclusions " + std::to_string(i) + " and " +
                           std::to_string(j) + " are nested"};
      if (polygon_pair_distance(a, b) <= pair_clearance)
        return {false, "inclusions " + std::to_string(i) + " and " +
                           std::to_string(j) + " overlap or touch"};
    }
  }
  return {true, ""};
}

}  // namespace

Scalar cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

Scalar orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  return cross2(b - a, c - a);
}

Scalar signed_area(const Polygon& p) {
  const int n = static_cast<int>(p.vertices.size());
  Scalar s = 0;
  for (int i = 0; i < n; ++i)
    s += cross2(p.vertices[i], p.vertices[(i + 1) % n]);
  return 0.5 * s;
}

Vec2 polygon_centroid(const Polygon& p) {
  const int n = static_cast<int>(p.vertices.size());
  Vec2 c = Vec2::Zero();
  Scalar a = 0;
  for (int i = 0; i < n; ++i) {
    const Vec2& u = p.vertices[i];
    const Vec2& v = p.vertices[(i + 1) % n];
    const Scalar w = cross2(u, v);
    c += w * (u + v);
    a += w;
  }
  return c / (3.0 * a);
}

PolygonCheck polygon_validate(const Polygon& p) {
  const int n = static_cast<int>(p.vertices.size());
  if (n < 3) return {false, "fewer than 3 vertices"};
  for (const Vec2& v : p.vertices)
    if (!v.allFinite()) return {false, "non-finite coordinates"};
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((p.vertices[i] - p.vertices[j]).norm() < kRepeatedVertexEps)
        return {false, "repeated vertices"};
  // self-intersection between non-adjacent edges; adjacent edges may be
  // collinear (straight vertex) but must not fold back onto each other
  for (int i = 0; i < n; ++i) {
    const Vec2& a0 = p.vertices[i];
    const Vec2& a1 = p.vertices[(i + 1) % n];
    for (int j = i + 1; j < n; ++j) {
      const Vec2& b0 = p.vertices[j];
      const Vec2& b1 = p.vertices[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        const Vec2& shared = (j == i + 1) ? a1 : a0;
        const Vec2& tip_a = (j == i + 1) ? a0 : a1;
        const Vec2& tip_b = (j == i + 1) ? b1 : b0;
        if (std::abs(orient2d(tip_a, shared, tip_b)) <= kCollinearEps &&
            (tip_a - shared).dot(tip_b - shared) > 0)
          return {false, "fold-back spike at a vertex"};
        continue;
      }
      if (segments_touch(a0, a1, b0, b1))
        return {false, "self-intersection"};
    }
  }
  if (signed_area(p) <= kAreaEps) return {false, "orientation not CCW"};
  return {true, ""};
}

PolygonCheck partition_validate(const Partition& part) {
  return partition_validate_impl(part, 0.0, 0.0, 0.0);
}

int vertex_count(const Partition& part) {
  int n = 0;
  for (const Polygon& p : part.inclusions)
    n += static_cast<int>(p.vertices.size());
  return n;
}

std::vector<Vec2> partition_vertices(const Partition& part) {
  std::vector<Vec2> v;
  v.reserve(vertex_count(part));
  for (const Polygon& p : part.inclusions)
    v.insert(v.end(), p.vertices.begin(), p.vertices.end());
  return v;
}

Partition regularize(const Partition& part,
                     const RegularizationParams& params) {
  if (!(params.delta1 > 0) || !(params.delta2 > params.delta1))
    throw GeometryError("regularize: need 0 < delta1 < delta2");
  PolygonCheck pc = partition_validate(part);
  if (!pc.ok) throw GeometryError("regularize: invalid partition: " + pc.reason);

  Partition out;
  out.inclusions.reserve(part.inclusions.size());
  for (const Polygon& poly : part.inclusions) {
    std::vector<Vec2> v = poly.vertices;
    int i = 0;
    bool wrap_done = false;
    int guard = 0;
    const int guard_max = 16 * static_cast<int>(v.size()) + 64;
    while (!wrap_done) {
      if (++guard > guard_max)
        throw GeometryError("regularize: pass failed to terminate");
      const int n = static_cast<int>(v.size());
      const int j = (i + 1) % n;
      const bool is_wrap = (j == 0);
      const Scalar d = (v[i] - v[j]).norm();
      if (d < params.delta1 && n > 3) {
        v.erase(v.begin() + j);
        if (is_wrap) {
          wrap_done = true;
        }
        // else stay at i: the new pair (survivor, next) is scanned next
      } else if (d > params.delta2) {
        const Vec2 mid = 0.5 * (v[i] + v[j]);
        if (is_wrap) {
          v.push_back(mid);
          wrap_done = true;
        } else {
          v.insert(v.begin() + i + 1, mid);
          i += 2;  // skip the midpoint; the halves are not re-examined
        }
      } else {
        if (is_wrap)
          wrap_done = true;
        else
          ++i;
      }
    }
    Polygon q{std::move(v)};
    PolygonCheck c = polygon_validate(q);
    if (!c.ok)
      throw GeometryError("regularize: degenerate polygon after pass: " +
                          c.reason);
    out.inclusions.push_back(std::move(q));
  }
  return out;
}

MoveResult move_vertices(const Partition& part, const std::vector<Vec2>& theta,
                         Scalar beta) {
  if (static_cast<int>(theta.size()) != vertex_count(part))
    throw GeometryError("move_vertices: theta size mismatch");
  if (!(beta > 0)) throw GeometryError("move_vertices: beta must be positive");

  Scalar b = beta;
  for (int attempt = 0; attempt <= 10; ++attempt) {
    Partition cand = part;
    int k = 0;
    for (Polygon& poly : cand.inclusions)
      for (Vec2& v : poly.vertices) v += b * theta[k++];
    if (partition_validate_impl(cand, kBoundaryMargin, kPairClearance,
                                kSelfClearance)
            .ok)
      return {std::move(cand), b};
    b *= 0.5;
  }
  throw GeometryError(
      "move_vertices: no feasible step size after 10 halvings");
}

bool point_in_polygon(const Polygon& p, const Vec2& q) {
  const int n = static_cast<int>(p.vertices.size());
  int wn = 0;
  for (int i = 0; i < n; ++i) {
    const Vec2& a = p.vertices[i];
    const Vec2& b = p.vertices[(i + 1) % n];
    if (a.y() <= q.y()) {
      if (b.y() > q.y() && orient2d(a, b, q) > 0) ++wn;
    } else {
      if (b.y() <= q.y() && orient2d(a, b, q) < 0) --wn;
    }
  }
  return wn != 0;
}

int locate(const Partition& part, const Vec2& q) {
  if (!(q.x() > 0 && q.x() < 1 && q.y() > 0 && q.y() < 1))
    throw GeometryError("locate: point outside the unit square");
  for (size_t i = 0; i < part.inclusions.size(); ++i)
    if (point_in_polygon(part.inclusions[i], q))
      return static_cast<int>(i) + 1;
  return 0;
}

Scalar symmetric_difference_area(const Polygon& a, const Polygon& b,
                                 int resolution) {
  if (resolution < 2)
    throw GeometryError("symmetric_difference_area: resolution too small");
  Vec2 lo(std::numeric_limits<Scalar>::infinity(),
          std::numeric_limits<Scalar>::infinity());
  Vec2 hi = -lo;
  for (const Polygon* p : {&a, &b}) {
    for (const Vec2& v : p->vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  }
  const Vec2 ext = hi - lo;
  const Scalar dx = ext.x() / resolution;
  const Scalar dy = ext.y() / resolution;
  if (dx == 0 || dy == 0) return 0;
  long hits = 0;
  for (int iy = 0; iy < resolution; ++iy) {
    const Scalar y = lo.y() + (iy + 0.5) * dy;
    for (int ix = 0; ix < resolution; ++ix) {
      const Vec2 q(lo.x() + (ix + 0.5) * dx, y);
      if (point_in_polygon(a, q) != point_in_polygon(b, q)) ++hits;
    }
  }
  return static_cast<Scalar>(hits) * dx * dy;
}

Polygon regular_ngon(const Vec2& center, Scalar radius, int n_sides) {
  if (n_sides < 3 || !(radius > 0))
    throw GeometryError("regular_ngon: need n >= 3 and radius > 0");
  Polygon p;
  p.vertices.reserve(n_sides);
  for (int k = 0; k < n_sides; ++k) {
    const Scalar a = 2.0 * M_PI * k / n_sides;
    p.vertices.emplace_back(center.x() + radius * std::cos(a),
                            center.y() + radius * std::sin(a));
  }
  return p;
}

}  // namespace eit
