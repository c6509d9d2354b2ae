#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace eit {

using Scalar = double;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Thrown when a geometric operation cannot produce a valid result
/// (degenerate polygon, no feasible step size, ...).
struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Simple polygon, vertices in counterclockwise order.
struct Polygon {
  std::vector<Vec2> vertices;
};

/// Disjoint polygonal inclusions strictly inside the unit square (0,1)^2.
/// Region ids: 0 is the background, inclusion i carries region id i+1.
struct Partition {
  std::vector<Polygon> inclusions;
};

/// Edge-length thresholds for the per-iteration vertex regularization pass.
struct RegularizationParams {
  Scalar delta1;  // consecutive vertices closer than this are merged
  Scalar delta2;  // edges longer than this receive a midpoint
};

struct PolygonCheck {
  bool ok = false;
  std::string reason;  // which invariant failed; empty when ok
};

Scalar cross2(const Vec2& a, const Vec2& b);
Scalar orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

Scalar signed_area(const Polygon& p);
Vec2 polygon_centroid(const Polygon& p);

/// Checks: at least 3 vertices, finite coordinates, no repeated vertices,
/// no self-intersection (consecutive collinear vertices are allowed, fold-back
/// spikes are not), counterclockwise orientation.
PolygonCheck polygon_validate(const Polygon& p);

/// Polygon checks plus: every vertex strictly inside (0,1)^2 and pairwise
/// disjoint inclusion closures.
PolygonCheck partition_validate(const Partition& part);

int vertex_count(const Partition& part);

/// All partition vertices in enumeration order: inclusion 0 first, each
/// polygon in vertex order. Shape gradients use the same ordering.
std::vector<Vec2> partition_vertices(const Partition& part);

/// One regularization pass per polygon: scan consecutive pairs including the
/// wrap-around pair; drop the second vertex of a pair closer than delta1
/// (skipped if the polygon would fall below 3 vertices, scanning continues
/// from the survivor), insert the midpoint of an edge longer than delta2
/// (the two halves are not re-examined this pass).
Partition regularize(const Partition& part, const RegularizationParams& params);

struct MoveResult {
  Partition partition;
  Scalar effective_beta;
};

/// Moves every partition vertex by beta * theta[l]. If the update breaks
/// simplicity, disjointness, or strict interiority, beta is halved jointly
/// for all vertices, up to 10 times. Throws GeometryError when no feasible
/// step remains.
MoveResult move_vertices(const Partition& part, const std::vector<Vec2>& theta,
                         Scalar beta);

/// Winding-number point-in-polygon test.
bool point_in_polygon(const Polygon& p, const Vec2& q);

/// Region id of the inclusion containing q, or 0 for the background.
/// q must lie inside the open unit square.
int locate(const Partition& part, const Vec2& q);

/// area(a symmetric-difference b) by rasterization over the joint bounding
/// box on a resolution x resolution grid of cell centers.
Scalar symmetric_difference_area(const Polygon& a, const Polygon& b,
                                 int resolution = 1000);

/// Regular n-gon, first vertex at angle 0 from the center.
Polygon regular_ngon(const Vec2& center, Scalar radius, int n_sides);

}  // namespace eit
