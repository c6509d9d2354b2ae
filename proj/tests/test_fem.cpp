#include "eit/fem.hpp"
#include "eit/measurements.hpp"

#include <doctest.h>

using namespace eit;

namespace {

Conductivity homogeneous() {
  Conductivity s;
  s.background = 1.0;
  s.values.resize(0);
  return s;
}

BoundaryFlux left_right() {
  BoundaryFlux g;
  g.level = 4;
  g.electrode_density = Eigen::VectorXd::Zero(4);
  g.electrode_density[3] = 1.0;
  g.electrode_density[1] = -1.0;
  return g;
}

}  // namespace

TEST_CASE("constants span the stiffness kernel") {
  const Conductivity sigma = phantom("pentagon");
  const TriMesh m = refine(coarse_mesh(sigma.partition, 4), 1);
  const P1Operators ops = p1_operators(m);
  const auto K = assemble(m, sigma, ops);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.nodes.size());
  CHECK((K * ones).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("stiffness scales linearly in sigma") {
  Conductivity one = homogeneous();
  Conductivity five = homogeneous();
  five.background = 5.0;
  const TriMesh m = coarse_mesh(Partition{}, 4);
  const P1Operators ops = p1_operators(m);
  const auto K1 = assemble(m, one, ops);
  const auto K5 = assemble(m, five, ops);
  CHECK((Eigen::MatrixXd(K5) - 5.0 * Eigen::MatrixXd(K1))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
}

TEST_CASE("single reference triangle element rows sum to zero") {
  TriMesh m;
  m.nodes = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  m.triangles = {{0, 1, 2}};
  m.region = {0};
  const P1Operators ops = p1_operators(m);
  const auto K = assemble(m, homogeneous(), ops);
  const Eigen::MatrixXd Kd(K);
  for (int i = 0; i < 3; ++i) CHECK(Kd.row(i).sum() == doctest::Approx(0.0));
  // the classic P1 element matrix on the unit right triangle
  CHECK(Kd(0, 0) == doctest::Approx(1.0));
  CHECK(Kd(1, 1) == doctest::Approx(0.5));
  CHECK(Kd(2, 2) == doctest::Approx(0.5));
}

TEST_CASE("manufactured linear solution is reproduced at every node") {
  const TriMesh m = refine(coarse_mesh(Partition{}, 4), 3);
  const P1Operators ops = p1_operators(m);
  const NeumannSolver solver(m, assemble(m, homogeneous(), ops));
  const NodalField u = solver.solve(solver.flux_load(left_right()), 0.0);
  Scalar err = 0;
  for (size_t i = 0; i < m.nodes.size(); ++i)
    err = std::max(err, std::abs(u[i] - (0.5 - m.nodes[i].x())));
  CHECK(err <= 1e-10);

  SUBCASE("postconditions: residual and boundary mean") {
    const Eigen::VectorXd load = solver.flux_load(left_right());
    CHECK((solver.matrix() * u - load).norm() <= 1e-10 * load.norm());
    CHECK(std::abs(boundary_integral(m, u)) <= 1e-10);
  }
  SUBCASE("min and max occur on the boundary") {
    Scalar bmin = 1e300, bmax = -1e300;
    for (const BoundaryEdge& be : m.boundary_edges) {
      bmin = std::min({bmin, u[be.a], u[be.b]});
      bmax = std::max({bmax, u[be.a], u[be.b]});
    }
    CHECK(u.minCoeff() >= bmin - 1e-12);
    CHECK(u.maxCoeff() <= bmax + 1e-12);
  }
}

TEST_CASE("zero flux gives the normalization constant") {
  const TriMesh m = refine(coarse_mesh(Partition{}, 4), 1);
  const P1Operators ops = p1_operators(m);
  const NeumannSolver solver(m, assemble(m, homogeneous(), ops));
  BoundaryFlux g;
  g.level = 4;
  g.electrode_density = Eigen::VectorXd::Zero(4);
  const NodalField u = solver.solve(solver.flux_load(g), 2.0);
  // int u ds = 2 over |boundary| = 4 means u = 0.5 everywhere
  CHECK((u.array() - 0.5).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("incompatible flux is rejected") {
  BoundaryFlux g;
  g.level = 4;
  g.electrode_density = Eigen::VectorXd::Zero(4);
  g.electrode_density[0] = 1.0;  // net current in
  CHECK_THROWS_AS(check_flux(g), FemError);
}

TEST_CASE("reciprocity and energy identity on the pentagon phantom") {
  const Conductivity sigma = phantom("pentagon");
  const TriMesh m = refine(coarse_mesh(sigma.partition, 4), 2);
  const P1Operators ops = p1_operators(m);
  const NeumannSolver solver(m, assemble(m, sigma, ops));
  const auto pats = patterns(4);
  std::vector<NodalField> u;
  std::vector<Eigen::VectorXd> loads;
  for (const auto& g : pats) {
    loads.push_back(solver.flux_load(g));
    u.push_back(solver.solve(loads.back(), 0.0));
  }
  for (size_t a = 0; a < pats.size(); ++a)
    for (size_t b = a + 1; b < pats.size(); ++b) {
      const Scalar lhs = loads[a].dot(u[b]);  // int g_a trace(u_b) ds
      const Scalar rhs = loads[b].dot(u[a]);
      CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(std::abs(lhs), 1.0));
    }
  for (size_t a = 0; a < pats.size(); ++a) {
    const Scalar energy = u[a].dot(solver.matrix() * u[a]);
    CHECK(energy == doctest::Approx(loads[a].dot(u[a])).epsilon(1e-9));
  }
}

TEST_CASE("misfit quadrature") {
  const TriMesh m = coarse_mesh(Partition{}, 4);
  const BoundarySampling bs = boundary_sampling(m);
  const int n = static_cast<int>(bs.nodes.size());

  SUBCASE("identical traces give zero") {
    Eigen::VectorXd f = Eigen::VectorXd::Random(n);
    CHECK(misfit(m, bs, {f}, {f}) == 0.0);
  }
  SUBCASE("a constant offset c gives c^2/2 |boundary|") {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
    const Eigen::VectorXd c = Eigen::VectorXd::Constant(n, 0.3);
    CHECK(misfit(m, bs, {c}, {zero}) ==
          doctest::Approx(0.5 * 0.09 * 4.0).epsilon(1e-12));
  }
  SUBCASE("doubling the residual quadruples the misfit") {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) f[i] = std::sin(2.0 * i);
    const Scalar j1 = misfit(m, bs, {f}, {zero});
    const Scalar j2 = misfit(m, bs, {Eigen::VectorXd(2 * f)}, {zero});
    CHECK(j2 == doctest::Approx(4 * j1).epsilon(1e-12));
  }
  SUBCASE("mismatched sampling is rejected") {
    const Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    const Eigen::VectorXd g = Eigen::VectorXd::Zero(n + 1);
    CHECK_THROWS_AS(misfit(m, bs, {f}, {g}), FemError);
  }
}

TEST_CASE("adjoint of matching data is constant") {
  const Conductivity sigma = phantom("pentagon");
  const TriMesh m = refine(coarse_mesh(sigma.partition, 4), 1);
  const BoundarySampling bs = boundary_sampling(m);
  const auto pats = patterns(4);
  // perfect data: the solver's own traces
  const P1Operators ops = p1_operators(m);
  const NeumannSolver solver(m, assemble(m, sigma, ops));
  std::vector<Eigen::VectorXd> data;
  for (const auto& g : pats)
    data.push_back(
        boundary_trace(m, bs, solver.solve(solver.flux_load(g), 0.0)));

  const ForwardSolution sol = solve_forward(m, sigma, pats, data);
  CHECK(sol.j_value <= 1e-20);
  for (const NodalField& z : sol.adjoints) {
    const Scalar mean = z.mean();
    CHECK((z.array() - mean).abs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("solve_forward normalizes states to the data boundary integral") {
  const Conductivity sigma = phantom("square");
  const TriMesh m = refine(coarse_mesh(sigma.partition, 4), 1);
  const BoundarySampling bs = boundary_sampling(m);
  const auto pats = patterns(4);
  std::vector<Eigen::VectorXd> data;
  for (size_t j = 0; j < pats.size(); ++j) {
    Eigen::VectorXd f(bs.nodes.size());
    for (size_t i = 0; i < bs.nodes.size(); ++i)
      f[i] = std::cos(bs.arclength[i] * (j + 1));
    data.push_back(f);
  }
  const ForwardSolution sol = solve_forward(m, sigma, pats, data);
  for (size_t j = 0; j < pats.size(); ++j) {
    const Scalar fu = trace_integral(m, bs, sol.state_traces[j]);
    const Scalar ff = trace_integral(m, bs, data[j]);
    CHECK(fu == doctest::Approx(ff).epsilon(1e-10));
  }
}

TEST_CASE("conductivity validation") {
  Conductivity s = phantom("pentagon");
  CHECK_NOTHROW(check_conductivity(s));
  s.values[0] = s.background;
  CHECK_THROWS_AS(check_conductivity(s), FemError);
  s.values[0] = 1e-9;  // below the lower bound
  CHECK_THROWS_AS(check_conductivity(s), FemError);
}
