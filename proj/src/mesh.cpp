#include "eit/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

namespace eit {

namespace {

constexpr Scalar kOnEdgeEps = 1e-12;
constexpr Scalar kInCircleEps = 1e-13;
constexpr Scalar kBoundarySegmentMax = 0.25;
constexpr Scalar kMinAngleDeg = 5.0;
constexpr int kMaxSteinerPoints = 300;
constexpr Scalar kSteinerClearance = 5e-3;

// ---------------------------------------------------------------------------
// Incremental constrained Delaunay triangulation.
//
// Triangles store vertices CCW; nb[i] is the neighbor across the edge
// opposite v[i] (-1 on the hull). Meshes here are small (tens to a few
// hundred points), so point location and edge searches are linear scans.
// ---------------------------------------------------------------------------
class Triangulator {
 public:
  explicit Triangulator(std::vector<Vec2> points) : pts_(std::move(points)) {
    // the first four points must be the square corners, CCW from (0,0)
    tris_.push_back({{0, 1, 2}, {-1, -1, -1}, true});
    tris_.push_back({{0, 2, 3}, {-1, -1, -1}, true});
    link(0, 1, 1, 2);
    for (int i = 4; i < static_cast<int>(pts_.size()); ++i) insert(i);
  }

  const std::vector<Vec2>& points() const { return pts_; }

  int add_point(const Vec2& p) {
    pts_.push_back(p);
    const int i = static_cast<int>(pts_.size()) - 1;
    insert(i);
    return i;
  }

  void constrain(int a, int b) {
    int guard = 0;
    const int guard_max = 2000 + 40 * static_cast<int>(tris_.size());
    while (!edge_exists(a, b)) {
      if (++guard > guard_max)
        throw MeshError("constraint recovery did not terminate");
      if (!flip_one_crossing(a, b))
        throw MeshError("constraint recovery found no flippable edge");
    }
    constrained_.insert(key(a, b));
    legalize_all();
  }

  bool is_constrained(int a, int b) const {
    return constrained_.count(key(a, b)) > 0;
  }

  void improve_quality() {
    for (int round = 0; round < kMaxSteinerPoints; ++round) {
      int worst = -1;
      Scalar worst_angle = kMinAngleDeg;
      for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
        if (!tris_[t].alive) continue;
        const Scalar a = min_angle_deg(t);
        if (a < worst_angle) {
          worst_angle = a;
          worst = t;
        }
      }
      if (worst < 0) return;
      if (!try_steiner(worst)) return;
    }
  }

  struct OutTri {
    std::array<int, 3> v;
  };

  std::vector<std::array<int, 3>> extract() const {
    std::vector<std::array<int, 3>> out;
    for (const Tri& t : tris_) {
      if (!t.alive) continue;
      if (orient2d(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]]) <= 0)
        throw MeshError("triangulation produced a degenerate triangle");
      out.push_back(t.v);
    }
    return out;
  }

 private:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> nb;
    bool alive;
  };

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::set<std::pair<int, int>> constrained_;

  static std::pair<int, int> key(int a, int b) {
    return {std::min(a, b), std::max(a, b)};
  }

  void link(int t, int et, int u, int eu) {
    tris_[t].nb[et] = u;
    tris_[u].nb[eu] = t;
  }

  void replace_neighbor(int t, int old_nb, int new_nb) {
    if (t < 0) return;
    for (int i = 0; i < 3; ++i)
      if (tris_[t].nb[i] == old_nb) {
        tris_[t].nb[i] = new_nb;
        return;
      }
    throw MeshError("triangulation adjacency corrupted");
  }

  Scalar orient(int a, int b, int c) const {
    return orient2d(pts_[a], pts_[b], pts_[c]);
  }

  static Scalar incircle(const Vec2& a, const Vec2& b, const Vec2& c,
                         const Vec2& d) {
    const Scalar adx = a.x() - d.x(), ady = a.y() - d.y();
    const Scalar bdx = b.x() - d.x(), bdy = b.y() - d.y();
    const Scalar cdx = c.x() - d.x(), cdy = c.y() - d.y();
    const Scalar ad = adx * adx + ady * ady;
    const Scalar bd = bdx * bdx + bdy * bdy;
    const Scalar cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
           ad * (bdx * cdy - bdy * cdx);
  }

  // point location by scan; returns triangle index, edge = -1 when strictly
  // inside, otherwise the local edge the point lies on
  std::pair<int, int> locate(const Vec2& p) const {
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      if (!tris_[t].alive) continue;
      const auto& v = tris_[t].v;
      Scalar d[3];
      for (int i = 0; i < 3; ++i)
        d[i] = orient2d(pts_[v[(i + 1) % 3]], pts_[v[(i + 2) % 3]], p);
      if (d[0] >= -kOnEdgeEps && d[1] >= -kOnEdgeEps && d[2] >= -kOnEdgeEps) {
        int on_edge = -1;
        int zeros = 0;
        for (int i = 0; i < 3; ++i)
          if (std::abs(d[i]) <= kOnEdgeEps) {
            on_edge = i;
            ++zeros;
          }
        if (zeros > 1) throw MeshError("point duplicates an existing node");
        return {t, on_edge};
      }
    }
    throw MeshError("point location failed");
  }

  void insert(int pi) {
    auto [t, e] = locate(pts_[pi]);
    if (e < 0)
      split_interior(t, pi);
    else
      split_edge(t, e, pi);
  }

  void split_interior(int t, int pi) {
    const auto v = tris_[t].v;
    const auto nb = tris_[t].nb;
    tris_[t].alive = false;
    const int A = push_tri({v[0], v[1], pi});
    const int B = push_tri({v[1], v[2], pi});
    const int C = push_tri({v[2], v[0], pi});
    tris_[A].nb = {B, C, nb[2]};
    tris_[B].nb = {C, A, nb[0]};
    tris_[C].nb = {A, B, nb[1]};
    replace_neighbor(nb[2], t, A);
    replace_neighbor(nb[0], t, B);
    replace_neighbor(nb[1], t, C);
    legalize_from({{A, 2}, {B, 2}, {C, 2}});
  }

  void split_edge(int t, int e, int pi) {
    const int u = tris_[t].nb[e];
    const auto tv = tris_[t].v;
    const int c = tv[e];
    const int a = tv[(e + 1) % 3];
    const int b = tv[(e + 2) % 3];
    const int nb_ca = tris_[t].nb[(e + 2) % 3];  // across (c,a)
    const int nb_bc = tris_[t].nb[(e + 1) % 3];  // across (b,c)
    const bool was_constrained = is_constrained(a, b);

    tris_[t].alive = false;
    const int T1 = push_tri({c, a, pi});
    const int T2 = push_tri({c, pi, b});
    tris_[T1].nb = {-1, T2, nb_ca};
    tris_[T2].nb = {-1, nb_bc, T1};
    replace_neighbor(nb_ca, t, T1);
    replace_neighbor(nb_bc, t, T2);

    std::vector<std::pair<int, int>> seeds = {{T1, 2}, {T2, 1}};
    if (u >= 0) {
      int f = -1;
      for (int i = 0; i < 3; ++i)
        if (tris_[u].nb[i] == t) f = i;
      if (f < 0) throw MeshError("triangulation adjacency corrupted");
      const int d = tris_[u].v[f];
      const int nb_db = tris_[u].nb[(f + 2) % 3];  // across (d,b)
      const int nb_ad = tris_[u].nb[(f + 1) % 3];  // across (a,d)
      tris_[u].alive = false;
      const int U1 = push_tri({d, b, pi});
      const int U2 = push_tri({d, pi, a});
      tris_[U1].nb = {T2, U2, nb_db};
      tris_[U2].nb = {T1, nb_ad, U1};
      tris_[T2].nb[0] = U1;
      tris_[T1].nb[0] = U2;
      replace_neighbor(nb_db, u, U1);
      replace_neighbor(nb_ad, u, U2);
      seeds.push_back({U1, 2});
      seeds.push_back({U2, 1});
    }
    if (was_constrained) {
      constrained_.erase(key(a, b));
      constrained_.insert(key(a, pi));
      constrained_.insert(key(pi, b));
    }
    legalize_from(seeds);
  }

  int push_tri(std::array<int, 3> v) {
    tris_.push_back({v, {-1, -1, -1}, true});
    return static_cast<int>(tris_.size()) - 1;
  }

  // Lawson flip propagation from the seed edges.
  void legalize_from(std::vector<std::pair<int, int>> seeds) {
    std::deque<std::pair<int, int>> q(seeds.begin(), seeds.end());
    int guard = 0;
    while (!q.empty()) {
      if (++guard > 200000) throw MeshError("legalization did not terminate");
      auto [t, e] = q.front();
      q.pop_front();
      if (t < 0 || !tris_[t].alive) continue;
      const int o = tris_[t].nb[e];
      if (o < 0) continue;
      const auto& v = tris_[t].v;
      if (is_constrained(v[(e + 1) % 3], v[(e + 2) % 3])) continue;
      int f = -1;
      for (int i = 0; i < 3; ++i)
        if (tris_[o].nb[i] == t) f = i;
      if (f < 0) continue;
      const int s = tris_[o].v[f];
      if (incircle(pts_[v[0]], pts_[v[1]], pts_[v[2]], pts_[s]) >
          kInCircleEps) {
        const auto [T1, T2] = flip(t, e, o, f);
        if (T1 >= 0) {
          q.push_back({T1, 0});
          q.push_back({T1, 2});
          q.push_back({T2, 0});
          q.push_back({T2, 1});
        }
      }
    }
  }

  void legalize_all() {
    std::vector<std::pair<int, int>> seeds;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
      if (tris_[t].alive)
        for (int e = 0; e < 3; ++e) seeds.push_back({t, e});
    legalize_from(std::move(seeds));
  }

  // Flips the shared edge of t (local edge e) and o (local edge f).
  // Returns the two new triangles, or {-1,-1} if the quad is not convex.
  std::pair<int, int> flip(int t, int e, int o, int f) {
    const int p = tris_[t].v[e];
    const int q = tris_[t].v[(e + 1) % 3];
    const int r = tris_[t].v[(e + 2) % 3];
    const int s = tris_[o].v[f];
    if (orient(p, q, s) <= kOnEdgeEps || orient(p, s, r) <= kOnEdgeEps)
      return {-1, -1};
    const int t_pq = tris_[t].nb[(e + 2) % 3];
    const int t_rp = tris_[t].nb[(e + 1) % 3];
    const int o_qs = tris_[o].nb[(f + 1) % 3];
    const int o_sr = tris_[o].nb[(f + 2) % 3];
    tris_[t].alive = false;
    tris_[o].alive = false;
    const int T1 = push_tri({p, q, s});
    const int T2 = push_tri({p, s, r});
    tris_[T1].nb = {o_qs, T2, t_pq};
    tris_[T2].nb = {o_sr, t_rp, T1};
    replace_neighbor(o_qs, o, T1);
    replace_neighbor(t_pq, t, T1);
    replace_neighbor(o_sr, o, T2);
    replace_neighbor(t_rp, t, T2);
    return {T1, T2};
  }

  bool edge_exists(int a, int b) const {
    for (const Tri& t : tris_) {
      if (!t.alive) continue;
      for (int i = 0; i < 3; ++i) {
        const int u = t.v[i], w = t.v[(i + 1) % 3];
        if ((u == a && w == b) || (u == b && w == a)) return true;
      }
    }
    return false;
  }

  static bool proper_crossing(const Vec2& a, const Vec2& b, const Vec2& u,
                              const Vec2& w) {
    const Scalar d1 = orient2d(a, b, u);
    const Scalar d2 = orient2d(a, b, w);
    const Scalar d3 = orient2d(u, w, a);
    const Scalar d4 = orient2d(u, w, b);
    return ((d1 > kOnEdgeEps && d2 < -kOnEdgeEps) ||
            (d1 < -kOnEdgeEps && d2 > kOnEdgeEps)) &&
           ((d3 > kOnEdgeEps && d4 < -kOnEdgeEps) ||
            (d3 < -kOnEdgeEps && d4 > kOnEdgeEps));
  }

  bool flip_one_crossing(int a, int b) {
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      if (!tris_[t].alive) continue;
      for (int e = 0; e < 3; ++e) {
        const int u = tris_[t].v[(e + 1) % 3];
        const int w = tris_[t].v[(e + 2) % 3];
        if (u == a || u == b || w == a || w == b) continue;
        if (!proper_crossing(pts_[a], pts_[b], pts_[u], pts_[w])) continue;
        if (is_constrained(u, w))
          throw MeshError("constraint crosses a constrained edge");
        const int o = tris_[t].nb[e];
        if (o < 0) continue;
        int f = -1;
        for (int i = 0; i < 3; ++i)
          if (tris_[o].nb[i] == t) f = i;
        if (f < 0) continue;
        if (flip(t, e, o, f).first >= 0) return true;
      }
    }
    return false;
  }

  Scalar min_angle_deg(int t) const {
    const Vec2& a = pts_[tris_[t].v[0]];
    const Vec2& b = pts_[tris_[t].v[1]];
    const Vec2& c = pts_[tris_[t].v[2]];
    const Scalar la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
    const Scalar aa =
        std::acos(std::clamp((lb * lb + lc * lc - la * la) / (2 * lb * lc),
                             -1.0, 1.0));
    const Scalar ab =
        std::acos(std::clamp((la * la + lc * lc - lb * lb) / (2 * la * lc),
                             -1.0, 1.0));
    const Scalar ac = M_PI - aa - ab;
    return std::min({aa, ab, ac}) * 180.0 / M_PI;
  }

  bool steiner_candidate_ok(const Vec2& c) const {
    if (c.x() < kSteinerClearance || c.x() > 1 - kSteinerClearance ||
        c.y() < kSteinerClearance || c.y() > 1 - kSteinerClearance)
      return false;
    for (const Vec2& p : pts_)
      if ((p - c).norm() < kSteinerClearance) return false;
    for (const auto& [a, b] : constrained_) {
      const Vec2& pa = pts_[a];
      const Vec2& pb = pts_[b];
      const Vec2 ab = pb - pa;
      const Scalar t = std::clamp((c - pa).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
      if ((c - (pa + t * ab)).norm() < kSteinerClearance) return false;
    }
    return true;
  }

  bool try_steiner(int t) {
    const Vec2& a = pts_[tris_[t].v[0]];
    const Vec2& b = pts_[tris_[t].v[1]];
    const Vec2& c = pts_[tris_[t].v[2]];
    // circumcenter; fall back to the centroid when it is not usable
    const Scalar d = 2 * orient2d(a, b, c);
    Vec2 cc;
    cc.x() = (a.squaredNorm() * (b.y() - c.y()) +
              b.squaredNorm() * (c.y() - a.y()) +
              c.squaredNorm() * (a.y() - b.y())) /
             d;
    cc.y() = (a.squaredNorm() * (c.x() - b.x()) +
              b.squaredNorm() * (a.x() - c.x()) +
              c.squaredNorm() * (b.x() - a.x())) /
             d;
    for (const Vec2& cand : {cc, Vec2((a + b + c) / 3.0)}) {
      if (!steiner_candidate_ok(cand)) continue;
      add_point(cand);
      return true;
    }
    return false;
  }
};

std::vector<Scalar> boundary_ticks(int electrode_level) {
  // electrode endpoints per side: corners, then midpoints (level 8), then
  // quarter points (level 16); segments are further subdivided to at most
  // kBoundarySegmentMax
  const int per_side = electrode_level / 4;
  std::vector<Scalar> ticks;
  for (int i = 0; i <= per_side; ++i)
    ticks.push_back(static_cast<Scalar>(i) / per_side);
  std::vector<Scalar> out;
  for (size_t i = 0; i + 1 < ticks.size(); ++i) {
    const Scalar a = ticks[i], b = ticks[i + 1];
    const int splits =
        std::max(1, static_cast<int>(std::ceil((b - a) / kBoundarySegmentMax -
                                               1e-12)));
    for (int k = 0; k < splits; ++k)
      out.push_back(a + (b - a) * k / splits);
  }
  out.push_back(1.0);
  return out;
}

Vec2 side_point(Side s, Scalar t) {
  switch (s) {
    case Side::bottom: return {t, 0.0};
    case Side::right: return {1.0, t};
    case Side::top: return {1.0 - t, 1.0};
    case Side::left: return {0.0, 1.0 - t};
  }
  throw MeshError("bad side");
}

Side side_of(const Vec2& p) {
  if (std::abs(p.y()) < kOnEdgeEps && p.x() < 1 - kOnEdgeEps)
    return Side::bottom;
  if (std::abs(p.x() - 1) < kOnEdgeEps && p.y() < 1 - kOnEdgeEps)
    return Side::right;
  if (std::abs(p.y() - 1) < kOnEdgeEps && p.x() > kOnEdgeEps) return Side::top;
  if (std::abs(p.x()) < kOnEdgeEps && p.y() > kOnEdgeEps) return Side::left;
  throw MeshError("point is not on the unit-square boundary");
}

}  // namespace

Scalar boundary_arclength(const Vec2& p) {
  switch (side_of(p)) {
    case Side::bottom: return p.x();
    case Side::right: return 1.0 + p.y();
    case Side::top: return 2.0 + (1.0 - p.x());
    case Side::left: return 3.0 + (1.0 - p.y());
  }
  throw MeshError("unreachable");
}

TriMesh coarse_mesh(const Partition& part, int electrode_level) {
  if (electrode_level != 4 && electrode_level != 8 && electrode_level != 16)
    throw MeshError("electrode level must be 4, 8 or 16");
  const PolygonCheck pc = partition_validate(part);
  if (!pc.ok) throw MeshError("coarse_mesh: invalid partition: " + pc.reason);

  // corners CCW from (0,0), then remaining boundary points, then partition
  // vertices; this node order is what refinement and hat fields rely on
  std::vector<Vec2> points = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const std::vector<Scalar> ticks = boundary_ticks(electrode_level);
  for (int s = 0; s < 4; ++s)
    for (size_t i = 1; i + 1 < ticks.size(); ++i)
      points.push_back(side_point(static_cast<Side>(s), ticks[i]));

  std::vector<int> vertex_node;
  for (const Polygon& poly : part.inclusions)
    for (const Vec2& v : poly.vertices) {
      vertex_node.push_back(static_cast<int>(points.size()));
      points.push_back(v);
    }

  Triangulator tri(points);

  int offset = 0;
  for (const Polygon& poly : part.inclusions) {
    const int n = static_cast<int>(poly.vertices.size());
    for (int i = 0; i < n; ++i)
      tri.constrain(vertex_node[offset + i], vertex_node[offset + (i + 1) % n]);
    offset += n;
  }

  tri.improve_quality();

  TriMesh m;
  m.nodes = tri.points();
  m.triangles = tri.extract();
  m.n_coarse_nodes = static_cast<int>(m.nodes.size());
  m.electrode_level = electrode_level;
  m.coarse_vertex_map = vertex_node;
  m.root.resize(m.triangles.size());
  for (size_t t = 0; t < m.triangles.size(); ++t)
    m.root[t] = static_cast<int>(t);

  m.region.resize(m.triangles.size());
  for (size_t t = 0; t < m.triangles.size(); ++t) {
    const Vec2 c = (m.nodes[m.triangles[t][0]] + m.nodes[m.triangles[t][1]] +
                    m.nodes[m.triangles[t][2]]) /
                   3.0;
    m.region[t] = locate(part, c);
  }

  // hull edges, oriented CCW, sorted by arclength
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : m.triangles)
    for (int e = 0; e < 3; ++e) {
      const int a = t[(e + 1) % 3], b = t[(e + 2) % 3];
      edge_count[{std::min(a, b), std::max(a, b)}]++;
    }
  const Scalar electrode_len = 4.0 / electrode_level;
  for (const auto& t : m.triangles)
    for (int e = 0; e < 3; ++e) {
      const int a = t[(e + 1) % 3], b = t[(e + 2) % 3];
      if (edge_count[{std::min(a, b), std::max(a, b)}] != 1) continue;
      BoundaryEdge be;
      be.a = a;
      be.b = b;
      const Vec2 mid = 0.5 * (m.nodes[a] + m.nodes[b]);
      be.side = side_of(mid);
      be.electrode = std::min(
          electrode_level - 1,
          static_cast<int>(boundary_arclength(mid) / electrode_len));
      m.boundary_edges.push_back(be);
    }
  std::sort(m.boundary_edges.begin(), m.boundary_edges.end(),
            [&](const BoundaryEdge& x, const BoundaryEdge& y) {
              return boundary_arclength(m.nodes[x.a]) <
                     boundary_arclength(m.nodes[y.a]);
            });

  check_mesh(m);
  return m;
}

TriMesh refine(const TriMesh& m, int levels) {
  if (levels < 1) throw MeshError("refine: levels must be >= 1");
  TriMesh cur = m;
  for (int l = 0; l < levels; ++l) {
    TriMesh next;
    next.nodes = cur.nodes;
    next.n_coarse_nodes = cur.n_coarse_nodes;
    next.electrode_level = cur.electrode_level;
    next.coarse_vertex_map = cur.coarse_vertex_map;
    next.refinement_level = cur.refinement_level + 1;

    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto k = std::make_pair(std::min(a, b), std::max(a, b));
      auto it = midpoint.find(k);
      if (it != midpoint.end()) return it->second;
      next.nodes.push_back(0.5 * (cur.nodes[a] + cur.nodes[b]));
      const int idx = static_cast<int>(next.nodes.size()) - 1;
      midpoint.emplace(k, idx);
      return idx;
    };

    for (size_t t = 0; t < cur.triangles.size(); ++t) {
      const auto [a, b, c] = cur.triangles[t];
      const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
      const int rt = cur.root.empty() ? static_cast<int>(t) : cur.root[t];
      for (const auto& child : {std::array<int, 3>{a, ab, ca},
                                std::array<int, 3>{ab, b, bc},
                                std::array<int, 3>{ca, bc, c},
                                std::array<int, 3>{ab, bc, ca}}) {
        next.triangles.push_back(child);
        next.parent.push_back(static_cast<int>(t));
        next.root.push_back(rt);
        next.region.push_back(cur.region[t]);
      }
    }

    for (const BoundaryEdge& be : cur.boundary_edges) {
      const int mv = mid(be.a, be.b);
      next.boundary_edges.push_back({be.a, mv, be.side, be.electrode});
      next.boundary_edges.push_back({mv, be.b, be.side, be.electrode});
    }
    cur = std::move(next);
  }
  return cur;
}

Scalar triangle_area(const TriMesh& m, int t) {
  const auto& tr = m.triangles[t];
  return 0.5 * orient2d(m.nodes[tr[0]], m.nodes[tr[1]], m.nodes[tr[2]]);
}

MeshQuality mesh_quality(const TriMesh& m) {
  MeshQuality q{180.0, 1.0};
  for (const auto& t : m.triangles) {
    const Vec2& a = m.nodes[t[0]];
    const Vec2& b = m.nodes[t[1]];
    const Vec2& c = m.nodes[t[2]];
    const Scalar la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
    const Scalar cos_a = (lb * lb + lc * lc - la * la) / (2 * lb * lc);
    const Scalar cos_b = (la * la + lc * lc - lb * lb) / (2 * la * lc);
    const Scalar aa = std::acos(std::clamp(cos_a, -1.0, 1.0));
    const Scalar ab = std::acos(std::clamp(cos_b, -1.0, 1.0));
    const Scalar ac = M_PI - aa - ab;
    q.min_angle_deg =
        std::min(q.min_angle_deg, std::min({aa, ab, ac}) * 180.0 / M_PI);
    q.max_aspect_ratio = std::max(
        q.max_aspect_ratio, std::max({la, lb, lc}) / std::min({la, lb, lc}));
  }
  return q;
}

BoundarySampling boundary_sampling(const TriMesh& m) {
  BoundarySampling s;
  s.nodes.reserve(m.boundary_edges.size());
  for (const BoundaryEdge& be : m.boundary_edges) {
    s.nodes.push_back(be.a);
    s.arclength.push_back(boundary_arclength(m.nodes[be.a]));
  }
  return s;
}

void check_mesh(const TriMesh& m) {
  Scalar total = 0;
  for (size_t t = 0; t < m.triangles.size(); ++t) {
    const Scalar a = triangle_area(m, static_cast<int>(t));
    if (a <= 0) throw MeshError("check_mesh: non-positive triangle area");
    total += a;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw MeshError("check_mesh: triangle areas do not sum to 1");

  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : m.triangles)
    for (int e = 0; e < 3; ++e) {
      const int a = t[(e + 1) % 3], b = t[(e + 2) % 3];
      edge_count[{std::min(a, b), std::max(a, b)}]++;
    }
  size_t hull = 0;
  for (const auto& [k, c] : edge_count) {
    if (c > 2) throw MeshError("check_mesh: edge shared by >2 triangles");
    if (c == 1) ++hull;
  }
  if (hull != m.boundary_edges.size())
    throw MeshError("check_mesh: boundary edge list inconsistent");
  for (const BoundaryEdge& be : m.boundary_edges) {
    auto it = edge_count.find({std::min(be.a, be.b), std::max(be.a, be.b)});
    if (it == edge_count.end() || it->second != 1)
      throw MeshError("check_mesh: boundary edge not a hull edge");
  }
  // Euler relation for a triangulated disk: V - E + T = 1
  const long V = static_cast<long>(m.nodes.size());
  const long E = static_cast<long>(edge_count.size());
  const long T = static_cast<long>(m.triangles.size());
  if (V - E + T != 1) throw MeshError("check_mesh: Euler relation violated");
}

}  // namespace eit
