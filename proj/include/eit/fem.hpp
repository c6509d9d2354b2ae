#pragma once

#include "eit/mesh.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <vector>

namespace eit {

struct FemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Global lower bound for conductivity values.
inline constexpr Scalar kSigmaMin = 1e-3;
/// Upper clamp applied by reconstruction updates.
inline constexpr Scalar kSigmaMax = 1e3;

/// Piecewise-constant conductivity: one value per inclusion plus the
/// background value on region 0.
struct Conductivity {
  Partition partition;
  Eigen::VectorXd values;
  Scalar background = 1.0;
};

void check_conductivity(const Conductivity& sigma);
Scalar sigma_of_region(const Conductivity& sigma, int region);
int region_count(const Conductivity& sigma);  // background + inclusions

/// Applied current density, piecewise constant per electrode.
struct BoundaryFlux {
  int level = 4;
  Eigen::VectorXd electrode_density;
};

void check_flux(const BoundaryFlux& g);  // zero net current within 1e-12

using NodalField = Eigen::VectorXd;

/// Per-triangle P1 shape-function gradients (column i is grad of the hat at
/// local vertex i) and triangle areas, cached for reuse.
struct P1Operators {
  std::vector<Eigen::Matrix<Scalar, 2, 3>> grad;
  std::vector<Scalar> area;
};

P1Operators p1_operators(const TriMesh& m);

/// Stiffness matrix K_ab = sum_T sigma(T) |T| grad(phi_a).grad(phi_b),
/// symmetric positive semidefinite with the constants as kernel.
Eigen::SparseMatrix<Scalar> assemble(const TriMesh& m,
                                     const Conductivity& sigma,
                                     const P1Operators& ops);

/// Stiffness with an explicit per-triangle coefficient (used by gradient
/// checks and mesh-transport tests).
Eigen::SparseMatrix<Scalar> assemble_coeff(const TriMesh& m,
                                           const std::vector<Scalar>& coeff,
                                           const P1Operators& ops);

std::vector<Scalar> sigma_per_triangle(const TriMesh& m,
                                       const Conductivity& sigma);

/// Boundary integral of a nodal field (trapezoid rule, exact for P1 traces).
Scalar boundary_integral(const TriMesh& m, const NodalField& u);

/// Values of a nodal field at the boundary nodes, in sampling order.
Eigen::VectorXd boundary_trace(const TriMesh& m, const BoundarySampling& bs,
                               const NodalField& u);

/// Integral of a trace given in sampling order.
Scalar trace_integral(const TriMesh& m, const BoundarySampling& bs,
                      const Eigen::VectorXd& trace);

/// L2(boundary) norm of a trace in sampling order (P1 quadrature, exact).
Scalar trace_l2_norm(const TriMesh& m, const BoundarySampling& bs,
                     const Eigen::VectorXd& trace);

/// 1/2 sum_j int (u_j - f_j)^2 ds with traces in sampling order.
Scalar misfit(const TriMesh& m, const BoundarySampling& bs,
              const std::vector<Eigen::VectorXd>& u_traces,
              const std::vector<Eigen::VectorXd>& f_traces);

/// Pure-Neumann solver. The singular system is solved by pinning one node
/// and shifting by a constant afterwards, which is exact because the kernel
/// consists of the constants. One factorization serves all right-hand sides.
class NeumannSolver {
 public:
  NeumannSolver(const TriMesh& m, Eigen::SparseMatrix<Scalar> K);

  /// Load vector of a piecewise-constant electrode flux.
  Eigen::VectorXd flux_load(const BoundaryFlux& g) const;

  /// Load vector of a piecewise-linear boundary density given in sampling
  /// order (exact integration against P1 traces).
  Eigen::VectorXd trace_load(const BoundarySampling& bs,
                             const Eigen::VectorXd& density) const;

  /// Solves K u = load with int_boundary u ds = target. The load must have
  /// zero sum (Neumann compatibility); the relative residual is checked.
  NodalField solve(const Eigen::VectorXd& load, Scalar target) const;

  /// Batched variant: one column per right-hand side.
  Eigen::MatrixXd solve_many(const Eigen::MatrixXd& loads,
                             const Eigen::VectorXd& targets) const;

  const TriMesh& mesh() const { return *mesh_; }
  const Eigen::SparseMatrix<Scalar>& matrix() const { return K_; }

 private:
  const TriMesh* mesh_;
  Eigen::SparseMatrix<Scalar> K_;
  Eigen::SparseMatrix<Scalar> K_red_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<Scalar>> ldlt_;
  bool use_cg_ = false;
};

/// States, adjoints and misfit for a full measurement sweep on one mesh.
/// Data traces are given in the mesh's boundary sampling order; state j is
/// normalized to int u_j ds = int f_j ds and the adjoint density is f_j-u_j.
struct ForwardSolution {
  std::vector<NodalField> states;
  std::vector<NodalField> adjoints;
  std::vector<Eigen::VectorXd> state_traces;
  Scalar j_value = 0;
};

ForwardSolution solve_forward(const TriMesh& m, const Conductivity& sigma,
                              const std::vector<BoundaryFlux>& patterns,
                              const std::vector<Eigen::VectorXd>& data);

}  // namespace eit
