#pragma once

#include "eit/geometry.hpp"

#include <array>
#include <vector>

namespace eit {

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Side : int { bottom = 0, right = 1, top = 2, left = 3 };

/// Oriented boundary edge (a -> b counterclockwise around the square).
struct BoundaryEdge {
  int a = -1;
  int b = -1;
  Side side = Side::bottom;
  int electrode = -1;
};

/// Conforming triangulation of the partitioned unit square.
///
/// A coarse mesh has the partition vertices as nodes and every partition edge
/// as a single mesh edge (no nodes on polygon sides). Refined meshes are
/// nested: `parent` points to the triangle of the previous level, `root` to
/// the triangle of the original coarse mesh, and the coarse nodes keep their
/// indices (indices [0, n_coarse_nodes) are coarse nodes on every level).
struct TriMesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;  // CCW node triples
  std::vector<int> region;                    // per triangle; 0 = background
  std::vector<BoundaryEdge> boundary_edges;   // CCW order from (0,0)
  std::vector<int> parent;  // per triangle, previous level (empty on coarse)
  std::vector<int> root;    // per triangle, original coarse mesh triangle
  std::vector<int> coarse_vertex_map;  // partition vertex -> coarse node
  int n_coarse_nodes = 0;
  int electrode_level = 4;
  int refinement_level = 0;
};

/// Constrained Delaunay mesh of the partitioned square. Boundary nodes are
/// the square corners, the electrode endpoints for `electrode_level`, and
/// uniform subdivision points keeping every boundary segment at most 0.25
/// long. Steiner points are only ever placed strictly inside regions.
TriMesh coarse_mesh(const Partition& part, int electrode_level);

/// Red refinement: every triangle splits into 4 congruent children via edge
/// midpoints, `levels` times. Region labels are inherited.
TriMesh refine(const TriMesh& m, int levels);

struct MeshQuality {
  Scalar min_angle_deg;
  Scalar max_aspect_ratio;  // longest edge / shortest edge of worst triangle
};

MeshQuality mesh_quality(const TriMesh& m);

Scalar triangle_area(const TriMesh& m, int t);

/// Arclength along the boundary, counterclockwise from the corner (0,0);
/// s in [0,4). The point must lie on the boundary of the unit square.
Scalar boundary_arclength(const Vec2& p);

/// Boundary nodes of a mesh in counterclockwise order starting at (0,0).
struct BoundarySampling {
  std::vector<int> nodes;        // mesh node indices
  std::vector<Scalar> arclength; // s of each node, increasing, s[0] = 0
};

BoundarySampling boundary_sampling(const TriMesh& m);

/// Structural checks used by tests and after construction: conformity,
/// positive areas, total area 1, partition edges present.
void check_mesh(const TriMesh& m);

}  // namespace eit
