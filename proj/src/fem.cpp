#include "eit/fem.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <cmath>

namespace eit {

namespace {

constexpr Scalar kResidualTol = 1e-10;
constexpr Scalar kCompatibilityTol = 1e-8;

Scalar edge_length(const TriMesh& m, int a, int b) {
  return (m.nodes[a] - m.nodes[b]).norm();
}

}  // namespace

void check_conductivity(const Conductivity& sigma) {
  const PolygonCheck pc = partition_validate(sigma.partition);
  if (!pc.ok) throw FemError("conductivity: invalid partition: " + pc.reason);
  if (sigma.values.size() !=
      static_cast<Eigen::Index>(sigma.partition.inclusions.size()))
    throw FemError("conductivity: one value per inclusion required");
  if (!(sigma.background >= kSigmaMin))
    throw FemError("conductivity: background below the lower bound");
  for (Eigen::Index i = 0; i < sigma.values.size(); ++i) {
    if (!(sigma.values[i] >= kSigmaMin))
      throw FemError("conductivity: value below the lower bound");
    if (sigma.values[i] == sigma.background)
      throw FemError("conductivity: inclusion value equals the background");
  }
}

Scalar sigma_of_region(const Conductivity& sigma, int region) {
  if (region == 0) return sigma.background;
  if (region < 0 || region > sigma.values.size())
    throw FemError("sigma_of_region: unknown region id");
  return sigma.values[region - 1];
}

int region_count(const Conductivity& sigma) {
  return static_cast<int>(sigma.values.size()) + 1;
}

void check_flux(const BoundaryFlux& g) {
  if (g.electrode_density.size() != g.level)
    throw FemError("flux: one density per electrode required");
  const Scalar electrode_len = 4.0 / g.level;
  const Scalar total = g.electrode_density.sum() * electrode_len;
  if (std::abs(total) > 1e-12)
    throw FemError("flux: nonzero net current");
}

P1Operators p1_operators(const TriMesh& m) {
  P1Operators ops;
  const size_t nt = m.triangles.size();
  ops.grad.resize(nt);
  ops.area.resize(nt);
  for (size_t t = 0; t < nt; ++t) {
    const auto& tr = m.triangles[t];
    const Vec2& p0 = m.nodes[tr[0]];
    const Vec2& p1 = m.nodes[tr[1]];
    const Vec2& p2 = m.nodes[tr[2]];
    const Scalar a2 = orient2d(p0, p1, p2);  // 2 * area
    if (a2 <= 0) throw FemError("p1_operators: non-positive triangle");
    ops.area[t] = 0.5 * a2;
    // grad(phi_i) = rot90(p_{i+2} - p_{i+1}) / (2 area)
    auto rot90 = [](const Vec2& v) { return Vec2(-v.y(), v.x()); };
    ops.grad[t].col(0) = rot90(p2 - p1) / a2;
    ops.grad[t].col(1) = rot90(p0 - p2) / a2;
    ops.grad[t].col(2) = rot90(p1 - p0) / a2;
  }
  return ops;
}

std::vector<Scalar> sigma_per_triangle(const TriMesh& m,
                                       const Conductivity& sigma) {
  std::vector<Scalar> s(m.triangles.size());
  for (size_t t = 0; t < m.triangles.size(); ++t) {
    if (m.region[t] < 0 || m.region[t] >= region_count(sigma))
      throw FemError("mesh region id missing from the conductivity");
    s[t] = sigma_of_region(sigma, m.region[t]);
  }
  return s;
}

Eigen::SparseMatrix<Scalar> assemble_coeff(const TriMesh& m,
                                           const std::vector<Scalar>& coeff,
                                           const P1Operators& ops) {
  const int n = static_cast<int>(m.nodes.size());
  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(m.triangles.size() * 9);
  for (size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tr = m.triangles[t];
    const Scalar w = coeff[t] * ops.area[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(tr[i], tr[j],
                          w * ops.grad[t].col(i).dot(ops.grad[t].col(j)));
  }
  Eigen::SparseMatrix<Scalar> K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

Eigen::SparseMatrix<Scalar> assemble(const TriMesh& m,
                                     const Conductivity& sigma,
                                     const P1Operators& ops) {
  return assemble_coeff(m, sigma_per_triangle(m, sigma), ops);
}

Scalar boundary_integral(const TriMesh& m, const NodalField& u) {
  Scalar s = 0;
  for (const BoundaryEdge& be : m.boundary_edges)
    s += 0.5 * edge_length(m, be.a, be.b) * (u[be.a] + u[be.b]);
  return s;
}

Eigen::VectorXd boundary_trace(const TriMesh& m, const BoundarySampling& bs,
                               const NodalField& u) {
  (void)m;
  Eigen::VectorXd tr(bs.nodes.size());
  for (size_t i = 0; i < bs.nodes.size(); ++i) tr[i] = u[bs.nodes[i]];
  return tr;
}

Scalar trace_integral(const TriMesh& m, const BoundarySampling& bs,
                      const Eigen::VectorXd& trace) {
  const int n = static_cast<int>(bs.nodes.size());
  Scalar s = 0;
  for (int i = 0; i < n; ++i) {
    const auto& be = m.boundary_edges[i];
    s += 0.5 * edge_length(m, be.a, be.b) * (trace[i] + trace[(i + 1) % n]);
  }
  return s;
}

Scalar trace_l2_norm(const TriMesh& m, const BoundarySampling& bs,
                     const Eigen::VectorXd& trace) {
  const int n = static_cast<int>(bs.nodes.size());
  Scalar s = 0;
  for (int i = 0; i < n; ++i) {
    const Scalar a = trace[i], b = trace[(i + 1) % n];
    const Scalar len = edge_length(m, m.boundary_edges[i].a,
                                   m.boundary_edges[i].b);
    s += len / 3.0 * (a * a + a * b + b * b);
  }
  return std::sqrt(s);
}

Scalar misfit(const TriMesh& m, const BoundarySampling& bs,
              const std::vector<Eigen::VectorXd>& u_traces,
              const std::vector<Eigen::VectorXd>& f_traces) {
  if (u_traces.size() != f_traces.size())
    throw FemError("misfit: pattern count mismatch");
  const int n = static_cast<int>(bs.nodes.size());
  Scalar total = 0;
  for (size_t j = 0; j < u_traces.size(); ++j) {
    if (u_traces[j].size() != n || f_traces[j].size() != n)
      throw FemError("misfit: trace sampling mismatch");
    Scalar s = 0;
    for (int i = 0; i < n; ++i) {
      const Scalar a = u_traces[j][i] - f_traces[j][i];
      const Scalar b = u_traces[j][(i + 1) % n] - f_traces[j][(i + 1) % n];
      const Scalar len = edge_length(m, m.boundary_edges[i].a,
                                     m.boundary_edges[i].b);
      s += len / 3.0 * (a * a + a * b + b * b);  // Simpson, exact here
    }
    total += 0.5 * s;
  }
  return total;
}

NeumannSolver::NeumannSolver(const TriMesh& m, Eigen::SparseMatrix<Scalar> K)
    : mesh_(&m), K_(std::move(K)) {
  const int n = static_cast<int>(m.nodes.size());
  if (K_.rows() != n || K_.cols() != n)
    throw FemError("solver: matrix size does not match the mesh");
  // reduced system with node 0 pinned to zero
  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(K_.nonZeros());
  for (int k = 0; k < K_.outerSize(); ++k)
    for (Eigen::SparseMatrix<Scalar>::InnerIterator it(K_, k); it; ++it)
      if (it.row() > 0 && it.col() > 0)
        trip.emplace_back(it.row() - 1, it.col() - 1, it.value());
  K_red_.resize(n - 1, n - 1);
  K_red_.setFromTriplets(trip.begin(), trip.end());
  ldlt_.compute(K_red_);
  if (ldlt_.info() != Eigen::Success) use_cg_ = true;
}

Eigen::VectorXd NeumannSolver::flux_load(const BoundaryFlux& g) const {
  check_flux(g);
  if (g.level != mesh_->electrode_level)
    throw FemError("flux electrode level does not match the mesh");
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh_->nodes.size());
  for (const BoundaryEdge& be : mesh_->boundary_edges) {
    const Scalar half = 0.5 * edge_length(*mesh_, be.a, be.b) *
                        g.electrode_density[be.electrode];
    load[be.a] += half;
    load[be.b] += half;
  }
  return load;
}

Eigen::VectorXd NeumannSolver::trace_load(const BoundarySampling& bs,
                                          const Eigen::VectorXd& density) const {
  const int n = static_cast<int>(bs.nodes.size());
  if (density.size() != n) throw FemError("trace_load: sampling mismatch");
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh_->nodes.size());
  for (int i = 0; i < n; ++i) {
    const auto& be = mesh_->boundary_edges[i];
    const Scalar len = edge_length(*mesh_, be.a, be.b);
    const Scalar da = density[i], db = density[(i + 1) % n];
    load[be.a] += len * (2 * da + db) / 6.0;
    load[be.b] += len * (da + 2 * db) / 6.0;
  }
  return load;
}

NodalField NeumannSolver::solve(const Eigen::VectorXd& load,
                                Scalar target) const {
  Eigen::VectorXd targets(1);
  targets[0] = target;
  return solve_many(load, targets).col(0);
}

Eigen::MatrixXd NeumannSolver::solve_many(const Eigen::MatrixXd& loads,
                                          const Eigen::VectorXd& targets) const {
  const int n = static_cast<int>(mesh_->nodes.size());
  const int m = static_cast<int>(loads.cols());
  if (loads.rows() != n || targets.size() != m)
    throw FemError("solve_many: bad load dimensions");
  for (int j = 0; j < m; ++j) {
    const Scalar l1 = loads.col(j).lpNorm<1>();
    if (std::abs(loads.col(j).sum()) > std::max(1e-10 * l1, 1e-12))
      throw FemError("solve: incompatible load (nonzero total flux)");
  }

  Eigen::MatrixXd red(n - 1, m);
  red = loads.bottomRows(n - 1);
  Eigen::MatrixXd sol_red;
  if (!use_cg_) {
    sol_red = ldlt_.solve(red);
  } else {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<Scalar>,
                             Eigen::Lower | Eigen::Upper>
        cg(K_red_);
    cg.setTolerance(1e-12);
    sol_red = cg.solve(red);
    if (cg.info() != Eigen::Success)
      throw FemError("solve: iterative solver did not converge");
  }

  Eigen::MatrixXd u(n, m);
  u.row(0).setZero();
  u.bottomRows(n - 1) = sol_red;
  for (int j = 0; j < m; ++j) {
    const Scalar res = (K_ * u.col(j) - loads.col(j)).norm();
    // absolute floor: roundoff-scale loads (perfect-data adjoints) cannot be
    // matched below machine precision
    if (res > std::max(kResidualTol * loads.col(j).norm(), 1e-13))
      throw FemError("solve: residual above tolerance");
    u.col(j).array() += (targets[j] - boundary_integral(*mesh_, u.col(j))) / 4.0;
  }
  return u;
}

ForwardSolution solve_forward(const TriMesh& m, const Conductivity& sigma,
                              const std::vector<BoundaryFlux>& patterns,
                              const std::vector<Eigen::VectorXd>& data) {
  if (patterns.size() != data.size())
    throw FemError("solve_forward: pattern/data count mismatch");
  const BoundarySampling bs = boundary_sampling(m);
  const P1Operators ops = p1_operators(m);
  const NeumannSolver solver(m, assemble(m, sigma, ops));

  const int n = static_cast<int>(m.nodes.size());
  const int M = static_cast<int>(patterns.size());
  Eigen::MatrixXd loads(n, M);
  Eigen::VectorXd targets(M);
  for (int j = 0; j < M; ++j) {
    loads.col(j) = solver.flux_load(patterns[j]);
    targets[j] = trace_integral(m, bs, data[j]);
  }
  const Eigen::MatrixXd states = solver.solve_many(loads, targets);

  ForwardSolution out;
  out.states.reserve(M);
  out.state_traces.reserve(M);
  Eigen::MatrixXd adj_loads(n, M);
  for (int j = 0; j < M; ++j) {
    out.states.push_back(states.col(j));
    out.state_traces.push_back(boundary_trace(m, bs, states.col(j)));
    const Eigen::VectorXd residual = data[j] - out.state_traces.back();
    const Scalar compat = std::abs(trace_integral(m, bs, residual));
    const Scalar scale =
        std::max(residual.cwiseAbs().maxCoeff(), Scalar(1e-12));
    if (compat > kCompatibilityTol * std::max(scale, Scalar(1)))
      throw FemError("solve_forward: adjoint compatibility violated");
    adj_loads.col(j) = solver.trace_load(bs, residual);
  }
  const Eigen::MatrixXd adjoints = solver.solve_many(adj_loads, targets);
  out.adjoints.reserve(M);
  for (int j = 0; j < M; ++j) out.adjoints.push_back(adjoints.col(j));

  std::vector<Eigen::VectorXd> fdata(data.begin(), data.end());
  out.j_value = misfit(m, bs, out.state_traces, fdata);
  return out;
}

}  // namespace eit
