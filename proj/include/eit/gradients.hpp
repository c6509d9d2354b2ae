#pragma once

#include "eit/fem.hpp"

#include <cstdint>

namespace eit {

struct GradientError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Piecewise-linear deformation field on the coarse mesh: one displacement
/// per coarse node, zero at every boundary node so the domain boundary stays
/// fixed.
struct DeformationField {
  std::vector<Vec2> displacement;
};

void check_deformation(const TriMesh& coarse, const DeformationField& u);

/// Random admissible field: zero on boundary nodes, components uniform in
/// [-amplitude, amplitude] elsewhere.
DeformationField random_deformation(const TriMesh& coarse, std::uint64_t seed,
                                    Scalar amplitude = 1.0);

/// Descent direction per partition vertex.
struct ShapeGradient {
  std::vector<Vec2> theta;

  Scalar max_norm() const {
    Scalar m = 0;
    for (const Vec2& t : theta) m = std::max(m, t.norm());
    return m;
  }
};

/// Misfit gradient with respect to the region values; entry 0 is the
/// background, entry r an inclusion region.
struct CoeffGradient {
  Eigen::VectorXd d;
};

/// A = div(U) I - (DU + DU^T) per refined triangle. DU is the constant
/// Jacobian of the piecewise-linear U on the root coarse triangle, so each
/// entry is exact (no quadrature).
std::vector<Mat2> cal_a(const DeformationField& u, const TriMesh& coarse,
                        const TriMesh& refined);

/// Deformation evaluated at every node of the nested refined mesh
/// (boundary nodes exactly zero).
std::vector<Vec2> deformation_at_nodes(const DeformationField& u,
                                       const TriMesh& coarse,
                                       const TriMesh& refined);

/// Per-root-triangle kernel sum_j sigma |T| grad(z_j) grad(u_j)^T. The
/// directional derivative in a field U is the contraction of this kernel
/// with A(U), which is constant per root triangle for piecewise-linear U.
struct ShapeKernel {
  std::vector<Mat2> g;  // one per coarse (root) triangle
};

ShapeKernel shape_kernel(const Conductivity& sigma, const TriMesh& coarse,
                         const TriMesh& refined,
                         const std::vector<NodalField>& states,
                         const std::vector<NodalField>& adjoints);

/// Distributed shape derivative sum_j int sigma A grad(u_j).grad(z_j) dx.
Scalar shape_directional(const ShapeKernel& kernel, const TriMesh& coarse,
                         const DeformationField& u);
Scalar shape_directional(const Conductivity& sigma, const TriMesh& coarse,
                         const TriMesh& refined,
                         const std::vector<NodalField>& states,
                         const std::vector<NodalField>& adjoints,
                         const DeformationField& u);

/// Descent direction at every partition vertex: minus the derivative paired
/// with the two hat fields of the vertex's coarse node.
ShapeGradient vertex_descent(const Conductivity& sigma, const TriMesh& coarse,
                             const TriMesh& refined,
                             const std::vector<NodalField>& states,
                             const std::vector<NodalField>& adjoints);

/// Misfit gradient with respect to the region values:
/// d/dsigma_r = sum_j int_{region r} grad(u_j).grad(z_j) dx.
CoeffGradient coeff_gradient(const TriMesh& refined,
                             const std::vector<NodalField>& states,
                             const std::vector<NodalField>& adjoints);

/// Boundary (jump) form of the shape derivative for a single inclusion:
/// bg*(k-1) sum_j int_{dP} (1/k du+/dn dz+/dn + grad_tau u . grad_tau z) U.n ds
/// with k the inclusion/background contrast. One-sided quantities are taken
/// from the exterior triangle of each interface sub-edge; U.n uses midpoint
/// quadrature, exact per sub-edge since the other factors are constant. The
/// bg prefactor rescales the value-k-against-1 statement to an arbitrary
/// background (states scale linearly in 1/bg, adjoints in 1/bg^2).
Scalar boundary_shape_directional(const Conductivity& sigma,
                                  const TriMesh& coarse,
                                  const TriMesh& refined,
                                  const std::vector<NodalField>& states,
                                  const std::vector<NodalField>& adjoints,
                                  const DeformationField& u);

struct FdCheck {
  Scalar analytic;
  Scalar central_fd;
  Scalar rel_err;
};

/// Central finite difference of the transported discrete misfit: the nodes
/// of the refined mesh move by +-t U (no remeshing, region labels fixed),
/// all states are re-solved and the misfit recomputed. The distributed
/// formula is the exact derivative of this map, so the disagreement is pure
/// finite-difference error.
FdCheck fd_check(const Conductivity& sigma, const TriMesh& coarse,
                 const TriMesh& refined,
                 const std::vector<BoundaryFlux>& patterns,
                 const std::vector<Eigen::VectorXd>& data,
                 const DeformationField& u, Scalar t);

}  // namespace eit
