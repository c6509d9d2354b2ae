#include "eit/checks.hpp"
#include "eit/gradients.hpp"
#include "eit/measurements.hpp"
#include "eit/recon.hpp"

#include <doctest.h>

#include <set>

using namespace eit;

namespace {

struct Setup {
  Conductivity sigma;
  TriMesh coarse;
  TriMesh refined;
  std::vector<BoundaryFlux> pats;
  std::vector<Eigen::VectorXd> data;
  ForwardSolution sol;
};

// trial 14-gon guess against pentagon phantom data (off the optimum)
Setup pentagon_trial(int refine_levels = 2) {
  Setup s;
  const MeasurementSet ms = synthesize(phantom("pentagon"), 4, 3);
  s.sigma = initial_guess({{{Vec2(0.5, 0.5), 0.25, 14, 10.0}}, 1.0});
  s.coarse = coarse_mesh(s.sigma.partition, 4);
  s.refined = refine(s.coarse, refine_levels);
  s.pats = ms.patterns;
  s.data = interpolate_traces(ms, s.refined);
  s.sol = solve_forward(s.refined, s.sigma, s.pats, s.data);
  return s;
}

// perfect data: traces of the trial conductivity itself on the same mesh
Setup perfect_setup(int refine_levels = 2) {
  Setup s;
  s.sigma = phantom("pentagon");
  s.coarse = coarse_mesh(s.sigma.partition, 4);
  s.refined = refine(s.coarse, refine_levels);
  s.pats = patterns(4);
  const std::vector<Eigen::VectorXd> zero(
      s.pats.size(),
      Eigen::VectorXd::Zero(boundary_sampling(s.refined).nodes.size()));
  const ForwardSolution pre = solve_forward(s.refined, s.sigma, s.pats, zero);
  s.data = pre.state_traces;
  s.sol = solve_forward(s.refined, s.sigma, s.pats, s.data);
  return s;
}

std::set<int> boundary_nodes(const TriMesh& m) {
  std::set<int> b;
  for (const BoundaryEdge& be : m.boundary_edges) {
    b.insert(be.a);
    b.insert(be.b);
  }
  return b;
}

// a coarse triangle with no boundary node, so a linear field prescribed on
// its corners is admissible
int interior_coarse_triangle(const TriMesh& coarse) {
  const std::set<int> b = boundary_nodes(coarse);
  for (size_t t = 0; t < coarse.triangles.size(); ++t)
    if (!b.count(coarse.triangles[t][0]) && !b.count(coarse.triangles[t][1]) &&
        !b.count(coarse.triangles[t][2]))
      return static_cast<int>(t);
  return -1;
}

}  // namespace

TEST_CASE("cal_a formula on prescribed linear fields") {
  const TriMesh coarse = coarse_mesh(phantom("pentagon").partition, 4);
  const TriMesh refined = refine(coarse, 1);
  const int tc = interior_coarse_triangle(coarse);
  REQUIRE(tc >= 0);

  DeformationField u;
  u.displacement.assign(coarse.nodes.size(), Vec2::Zero());

  SUBCASE("zero field gives zero") {
    const auto a = cal_a(u, coarse, refined);
    for (const Mat2& m : a) CHECK(m.norm() == 0);
  }
  SUBCASE("U = (x, 0) locally gives [[-1,0],[0,1]]") {
    for (int i = 0; i < 3; ++i) {
      const int n = coarse.triangles[tc][i];
      u.displacement[n] = Vec2(coarse.nodes[n].x(), 0.0);
    }
    const auto a = cal_a(u, coarse, refined);
    Mat2 want;
    want << -1, 0, 0, 1;
    for (size_t t = 0; t < refined.triangles.size(); ++t)
      if (refined.root[t] == tc) CHECK((a[t] - want).norm() <= 1e-12);
  }
  SUBCASE("rigid rotation gives zero") {
    for (int i = 0; i < 3; ++i) {
      const int n = coarse.triangles[tc][i];
      u.displacement[n] = Vec2(-coarse.nodes[n].y(), coarse.nodes[n].x());
    }
    const auto a = cal_a(u, coarse, refined);
    for (size_t t = 0; t < refined.triangles.size(); ++t)
      if (refined.root[t] == tc) CHECK(a[t].norm() <= 1e-12);
  }
}

TEST_CASE("deformation fields must vanish on the boundary") {
  const TriMesh coarse = coarse_mesh(Partition{}, 4);
  DeformationField u;
  u.displacement.assign(coarse.nodes.size(), Vec2::Zero());
  u.displacement[0] = Vec2(1, 0);  // corner (0,0)
  CHECK_THROWS_AS(check_deformation(coarse, u), GradientError);
}

TEST_CASE("perfect data makes every gradient vanish") {
  const Setup s = perfect_setup();

  const ShapeGradient theta = vertex_descent(s.sigma, s.coarse, s.refined,
                                             s.sol.states, s.sol.adjoints);
  CHECK(theta.max_norm() <= 1e-12);

  const CoeffGradient cg =
      coeff_gradient(s.refined, s.sol.states, s.sol.adjoints);
  CHECK(cg.d.cwiseAbs().maxCoeff() <= 1e-12);

  const DeformationField u = random_deformation(s.coarse, 3, 0.5);
  CHECK(std::abs(shape_directional(s.sigma, s.coarse, s.refined, s.sol.states,
                                   s.sol.adjoints, u)) <= 1e-12);
  CHECK(std::abs(boundary_shape_directional(s.sigma, s.coarse, s.refined,
                                            s.sol.states, s.sol.adjoints,
                                            u)) <= 1e-12);
}

TEST_CASE("shape_directional is linear in the field") {
  const Setup s = pentagon_trial(1);
  const ShapeKernel kernel = shape_kernel(s.sigma, s.coarse, s.refined,
                                          s.sol.states, s.sol.adjoints);
  const DeformationField ua = random_deformation(s.coarse, 10, 1.0);
  const DeformationField ub = random_deformation(s.coarse, 11, 1.0);
  const Scalar da = shape_directional(kernel, s.coarse, ua);
  const Scalar db = shape_directional(kernel, s.coarse, ub);
  DeformationField combo;
  combo.displacement.resize(ua.displacement.size());
  for (size_t i = 0; i < ua.displacement.size(); ++i)
    combo.displacement[i] =
        2.0 * ua.displacement[i] - 0.5 * ub.displacement[i];
  const Scalar dc = shape_directional(kernel, s.coarse, combo);
  CHECK(dc == doctest::Approx(2.0 * da - 0.5 * db).epsilon(1e-12));
}

TEST_CASE("vertex_descent matches shape_directional on hat fields") {
  const Setup s = pentagon_trial(1);
  const ShapeKernel kernel = shape_kernel(s.sigma, s.coarse, s.refined,
                                          s.sol.states, s.sol.adjoints);
  const ShapeGradient theta = vertex_descent(s.sigma, s.coarse, s.refined,
                                             s.sol.states, s.sol.adjoints);
  REQUIRE(theta.theta.size() == s.coarse.coarse_vertex_map.size());
  for (size_t l = 0; l < theta.theta.size(); l += 3) {
    const int node = s.coarse.coarse_vertex_map[l];
    DeformationField hat_x, hat_y;
    hat_x.displacement.assign(s.coarse.nodes.size(), Vec2::Zero());
    hat_y.displacement.assign(s.coarse.nodes.size(), Vec2::Zero());
    hat_x.displacement[node] = Vec2(1, 0);
    hat_y.displacement[node] = Vec2(0, 1);
    CHECK(theta.theta[l].x() ==
          doctest::Approx(-shape_directional(kernel, s.coarse, hat_x))
              .epsilon(1e-12));
    CHECK(theta.theta[l].y() ==
          doctest::Approx(-shape_directional(kernel, s.coarse, hat_y))
              .epsilon(1e-12));
  }
}

TEST_CASE("coefficient gradient sums to the whole-domain integral") {
  const Setup s = pentagon_trial(1);
  const CoeffGradient cg =
      coeff_gradient(s.refined, s.sol.states, s.sol.adjoints);
  REQUIRE(cg.d.size() == 2);
  const P1Operators ops = p1_operators(s.refined);
  Scalar whole = 0;
  for (size_t t = 0; t < s.refined.triangles.size(); ++t) {
    const auto& tr = s.refined.triangles[t];
    for (size_t j = 0; j < s.sol.states.size(); ++j) {
      Vec2 gu = Vec2::Zero(), gz = Vec2::Zero();
      for (int i = 0; i < 3; ++i) {
        gu += s.sol.states[j][tr[i]] * ops.grad[t].col(i);
        gz += s.sol.adjoints[j][tr[i]] * ops.grad[t].col(i);
      }
      whole += ops.area[t] * gu.dot(gz);
    }
  }
  CHECK(cg.d.sum() == doctest::Approx(whole).epsilon(1e-12));
}

TEST_CASE("transported-mesh finite differences confirm the formula") {
  const Setup s = pentagon_trial(2);

  SUBCASE("zero field gives zero on both routes") {
    DeformationField zero;
    zero.displacement.assign(s.coarse.nodes.size(), Vec2::Zero());
    const FdCheck r =
        fd_check(s.sigma, s.coarse, s.refined, s.pats, s.data, zero, 1e-5);
    CHECK(r.analytic == 0.0);
    CHECK(r.central_fd == 0.0);
  }
  SUBCASE("hat field at one vertex") {
    DeformationField hat;
    hat.displacement.assign(s.coarse.nodes.size(), Vec2::Zero());
    hat.displacement[s.coarse.coarse_vertex_map[0]] = Vec2(1, 0);
    const FdCheck r =
        fd_check(s.sigma, s.coarse, s.refined, s.pats, s.data, hat, 1e-5);
    CHECK(r.rel_err <= 1e-5);
  }
  SUBCASE("random admissible fields") {
    for (int k = 0; k < 5; ++k) {
      const DeformationField u = random_deformation(s.coarse, 100 + k, 0.5);
      const FdCheck r =
          fd_check(s.sigma, s.coarse, s.refined, s.pats, s.data, u, 1e-5);
      CHECK(r.rel_err <= 1e-4);
    }
  }
  SUBCASE("central differences converge at second order") {
    const DeformationField u = random_deformation(s.coarse, 100, 0.5);
    const Scalar e3 =
        fd_check(s.sigma, s.coarse, s.refined, s.pats, s.data, u, 1e-3)
            .rel_err;
    const Scalar e4 =
        fd_check(s.sigma, s.coarse, s.refined, s.pats, s.data, u, 1e-4)
            .rel_err;
    CHECK(e4 < e3);
    CHECK(e3 / std::max(e4, 1e-300) > 30.0);  // two decades expected
  }
  SUBCASE("oversized t is rejected") {
    const DeformationField u = random_deformation(s.coarse, 100, 0.5);
    CHECK_THROWS_AS(
        fd_check(s.sigma, s.coarse, s.refined, s.pats, s.data, u, 10.0),
        GradientError);
  }
}

TEST_CASE("coefficient gradient matches central finite differences") {
  const CoeffCheck r = check_coeff("pentagon", 1e-6, 2);
  CHECK(r.max_rel_err <= 1e-6);
  CHECK(r.pass);
}

TEST_CASE("descent direction points outward for a too-small trial inclusion") {
  // the true inclusion strictly contains the trial square, values known
  Conductivity truth;
  truth.background = 1.0;
  truth.values.resize(1);
  truth.values[0] = 5.0;
  truth.partition.inclusions.push_back(
      Polygon{{Vec2(0.30, 0.30), Vec2(0.70, 0.30), Vec2(0.70, 0.70),
               Vec2(0.30, 0.70)}});
  const MeasurementSet ms = synthesize(truth, 4, 3);

  Conductivity trial = truth;
  trial.partition.inclusions[0] =
      Polygon{{Vec2(0.42, 0.42), Vec2(0.58, 0.42), Vec2(0.58, 0.58),
               Vec2(0.42, 0.58)}};
  const TriMesh coarse = coarse_mesh(trial.partition, 4);
  const TriMesh refined = refine(coarse, 2);
  const ForwardSolution sol = solve_forward(refined, trial, ms.patterns,
                                            interpolate_traces(ms, refined));
  const ShapeGradient theta =
      vertex_descent(trial, coarse, refined, sol.states, sol.adjoints);

  const Vec2 c(0.5, 0.5);
  Scalar outward = 0;
  for (size_t l = 0; l < theta.theta.size(); ++l) {
    const Vec2 nu =
        (trial.partition.inclusions[0].vertices[l] - c).normalized();
    outward += theta.theta[l].dot(nu);
  }
  CHECK(outward > 0);
}

TEST_CASE("boundary form requires a single inclusion") {
  const Conductivity hl = phantom("heart_lung");
  const TriMesh coarse = coarse_mesh(hl.partition, 4);
  const TriMesh refined = refine(coarse, 1);
  const std::vector<Eigen::VectorXd> zero(
      6, Eigen::VectorXd::Zero(boundary_sampling(refined).nodes.size()));
  const ForwardSolution sol = solve_forward(refined, hl, patterns(4), zero);
  const DeformationField u = random_deformation(coarse, 5, 0.5);
  CHECK_THROWS_AS(boundary_shape_directional(hl, coarse, refined, sol.states,
                                             sol.adjoints, u),
                  GradientError);
}

TEST_CASE("distributed and boundary forms agree and converge together") {
  const BoundaryCheck r = check_boundary_equivalence(0.05, 3, 7);
  REQUIRE(r.relative_gap.size() == 3);
  CHECK(r.gap_at_level3 <= 0.05);
  CHECK(r.relative_gap[1] <= r.relative_gap[0]);
  CHECK(r.relative_gap[2] <= r.relative_gap[1]);
}
