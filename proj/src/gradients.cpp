#include "eit/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

namespace eit {

namespace {

std::set<int> boundary_node_set(const TriMesh& m) {
  std::set<int> s;
  for (const BoundaryEdge& be : m.boundary_edges) {
    s.insert(be.a);
    s.insert(be.b);
  }
  return s;
}

Mat2 jacobian_on_root(const DeformationField& u, const TriMesh& coarse,
                      const P1Operators& coarse_ops, int root) {
  Mat2 du = Mat2::Zero();
  const auto& tr = coarse.triangles[root];
  for (int i = 0; i < 3; ++i)
    du += u.displacement[tr[i]] * coarse_ops.grad[root].col(i).transpose();
  return du;
}

Mat2 a_of_jacobian(const Mat2& du) {
  return du.trace() * Mat2::Identity() - (du + du.transpose());
}

Vec2 eval_linear(const DeformationField& u, const TriMesh& coarse, int root,
                 const Vec2& p) {
  const auto& tr = coarse.triangles[root];
  const Vec2& a = coarse.nodes[tr[0]];
  const Vec2& b = coarse.nodes[tr[1]];
  const Vec2& c = coarse.nodes[tr[2]];
  const Scalar d = cross2(b - a, c - a);
  const Scalar l1 = cross2(p - a, c - a) / d;
  const Scalar l2 = cross2(b - a, p - a) / d;
  const Scalar l0 = 1.0 - l1 - l2;
  return l0 * u.displacement[tr[0]] + l1 * u.displacement[tr[1]] +
         l2 * u.displacement[tr[2]];
}

void require_nested(const TriMesh& coarse, const TriMesh& refined) {
  if (refined.root.empty() ||
      refined.root.size() != refined.triangles.size())
    throw GradientError("refined mesh has no root links");
  for (int r : refined.root)
    if (r < 0 || r >= static_cast<int>(coarse.triangles.size()))
      throw GradientError("refined mesh is not nested in the coarse mesh");
}

}  // namespace

void check_deformation(const TriMesh& coarse, const DeformationField& u) {
  if (u.displacement.size() != coarse.nodes.size())
    throw GradientError("deformation: one displacement per coarse node");
  for (int n : boundary_node_set(coarse))
    if (u.displacement[n].norm() != 0)
      throw GradientError("deformation: nonzero on a boundary node");
}

DeformationField random_deformation(const TriMesh& coarse, std::uint64_t seed,
                                    Scalar amplitude) {
  std::mt19937_64 rng(seed);
  auto unit = [&rng]() {
    return 2.0 * (static_cast<Scalar>(rng() >> 11) * 0x1.0p-53) - 1.0;
  };
  const std::set<int> bset = boundary_node_set(coarse);
  DeformationField u;
  u.displacement.assign(coarse.nodes.size(), Vec2::Zero());
  for (size_t i = 0; i < coarse.nodes.size(); ++i) {
    if (bset.count(static_cast<int>(i))) continue;
    u.displacement[i] = Vec2(amplitude * unit(), amplitude * unit());
  }
  return u;
}

std::vector<Mat2> cal_a(const DeformationField& u, const TriMesh& coarse,
                        const TriMesh& refined) {
  check_deformation(coarse, u);
  require_nested(coarse, refined);
  const P1Operators cops = p1_operators(coarse);
  std::vector<Mat2> per_root(coarse.triangles.size());
  for (size_t r = 0; r < coarse.triangles.size(); ++r)
    per_root[r] = a_of_jacobian(jacobian_on_root(u, coarse, cops,
                                                 static_cast<int>(r)));
  std::vector<Mat2> out(refined.triangles.size());
  for (size_t t = 0; t < refined.triangles.size(); ++t)
    out[t] = per_root[refined.root[t]];
  return out;
}

std::vector<Vec2> deformation_at_nodes(const DeformationField& u,
                                       const TriMesh& coarse,
                                       const TriMesh& refined) {
  check_deformation(coarse, u);
  require_nested(coarse, refined);
  std::vector<Vec2> disp(refined.nodes.size(), Vec2::Zero());
  std::vector<char> done(refined.nodes.size(), 0);
  for (size_t t = 0; t < refined.triangles.size(); ++t) {
    const int root = refined.root[t];
    for (int i = 0; i < 3; ++i) {
      const int n = refined.triangles[t][i];
      if (done[n]) continue;
      disp[n] = eval_linear(u, coarse, root, refined.nodes[n]);
      done[n] = 1;
    }
  }
  for (int n : boundary_node_set(refined)) disp[n] = Vec2::Zero();
  return disp;
}

ShapeKernel shape_kernel(const Conductivity& sigma, const TriMesh& coarse,
                         const TriMesh& refined,
                         const std::vector<NodalField>& states,
                         const std::vector<NodalField>& adjoints) {
  if (states.size() != adjoints.size())
    throw GradientError("shape_kernel: state/adjoint count mismatch");
  require_nested(coarse, refined);
  const P1Operators ops = p1_operators(refined);
  const std::vector<Scalar> s_tri = sigma_per_triangle(refined, sigma);

  ShapeKernel kernel;
  kernel.g.assign(coarse.triangles.size(), Mat2::Zero());
  for (size_t t = 0; t < refined.triangles.size(); ++t) {
    const auto& tr = refined.triangles[t];
    const Scalar w = s_tri[t] * ops.area[t];
    Mat2 acc = Mat2::Zero();
    for (size_t j = 0; j < states.size(); ++j) {
      Vec2 gu = Vec2::Zero(), gz = Vec2::Zero();
      for (int i = 0; i < 3; ++i) {
        gu += states[j][tr[i]] * ops.grad[t].col(i);
        gz += adjoints[j][tr[i]] * ops.grad[t].col(i);
      }
      acc += gz * gu.transpose();
    }
    kernel.g[refined.root[t]] += w * acc;
  }
  return kernel;
}

Scalar shape_directional(const ShapeKernel& kernel, const TriMesh& coarse,
                         const DeformationField& u) {
  check_deformation(coarse, u);
  if (kernel.g.size() != coarse.triangles.size())
    throw GradientError("shape_directional: kernel/mesh mismatch");
  const P1Operators cops = p1_operators(coarse);
  Scalar s = 0;
  for (size_t r = 0; r < coarse.triangles.size(); ++r) {
    const Mat2 a =
        a_of_jacobian(jacobian_on_root(u, coarse, cops, static_cast<int>(r)));
    s += a.cwiseProduct(kernel.g[r]).sum();
  }
  return s;
}

Scalar shape_directional(const Conductivity& sigma, const TriMesh& coarse,
                         const TriMesh& refined,
                         const std::vector<NodalField>& states,
                         const std::vector<NodalField>& adjoints,
                         const DeformationField& u) {
  return shape_directional(shape_kernel(sigma, coarse, refined, states,
                                        adjoints),
                           coarse, u);
}

ShapeGradient vertex_descent(const Conductivity& sigma, const TriMesh& coarse,
                             const TriMesh& refined,
                             const std::vector<NodalField>& states,
                             const std::vector<NodalField>& adjoints) {
  const ShapeKernel kernel =
      shape_kernel(sigma, coarse, refined, states, adjoints);
  const P1Operators cops = p1_operators(coarse);

  std::vector<std::vector<std::pair<int, int>>> incident(coarse.nodes.size());
  for (size_t r = 0; r < coarse.triangles.size(); ++r)
    for (int i = 0; i < 3; ++i)
      incident[coarse.triangles[r][i]].push_back({static_cast<int>(r), i});

  ShapeGradient out;
  out.theta.reserve(coarse.coarse_vertex_map.size());
  for (int node : coarse.coarse_vertex_map) {
    if (node < 0 || node >= static_cast<int>(coarse.nodes.size()))
      throw GradientError("vertex_descent: partition vertex is not a node");
    // hat field at this node: A(U) restricted to incident coarse triangles,
    // with g the hat gradient there:
    //   U=(phi,0): A = [[-gx,-gy],[-gy, gx]]
    //   U=(0,phi): A = [[ gy,-gx],[-gx,-gy]]
    Scalar dx = 0, dy = 0;
    for (const auto& [r, i] : incident[node]) {
      const Vec2 g = cops.grad[r].col(i);
      const Mat2& G = kernel.g[r];
      dx += -g.x() * G(0, 0) - g.y() * G(0, 1) - g.y() * G(1, 0) +
            g.x() * G(1, 1);
      dy += g.y() * G(0, 0) - g.x() * G(0, 1) - g.x() * G(1, 0) -
            g.y() * G(1, 1);
    }
    out.theta.emplace_back(-dx, -dy);
  }
  return out;
}

CoeffGradient coeff_gradient(const TriMesh& refined,
                             const std::vector<NodalField>& states,
                             const std::vector<NodalField>& adjoints) {
  if (states.size() != adjoints.size())
    throw GradientError("coeff_gradient: state/adjoint count mismatch");
  const P1Operators ops = p1_operators(refined);
  const int nr = 1 + *std::max_element(refined.region.begin(),
                                       refined.region.end());
  CoeffGradient out;
  out.d = Eigen::VectorXd::Zero(nr);
  for (size_t t = 0; t < refined.triangles.size(); ++t) {
    const auto& tr = refined.triangles[t];
    Scalar s = 0;
    for (size_t j = 0; j < states.size(); ++j) {
      Vec2 gu = Vec2::Zero(), gz = Vec2::Zero();
      for (int i = 0; i < 3; ++i) {
        gu += states[j][tr[i]] * ops.grad[t].col(i);
        gz += adjoints[j][tr[i]] * ops.grad[t].col(i);
      }
      s += gu.dot(gz);
    }
    out.d[refined.region[t]] += ops.area[t] * s;
  }
  return out;
}

Scalar boundary_shape_directional(const Conductivity& sigma,
                                  const TriMesh& coarse,
                                  const TriMesh& refined,
                                  const std::vector<NodalField>& states,
                                  const std::vector<NodalField>& adjoints,
                                  const DeformationField& u) {
  if (sigma.partition.inclusions.size() != 1)
    throw GradientError(
        "boundary_shape_directional: exactly one inclusion required");
  check_deformation(coarse, u);
  require_nested(coarse, refined);
  const Scalar k = sigma.values[0] / sigma.background;
  const P1Operators ops = p1_operators(refined);

  // interface sub-edges: shared by one background and one inclusion triangle
  std::map<std::pair<int, int>, std::vector<int>> edge_tris;
  for (size_t t = 0; t < refined.triangles.size(); ++t)
    for (int e = 0; e < 3; ++e) {
      const int a = refined.triangles[t][(e + 1) % 3];
      const int b = refined.triangles[t][(e + 2) % 3];
      edge_tris[{std::min(a, b), std::max(a, b)}].push_back(
          static_cast<int>(t));
    }

  auto tri_grad = [&](int t, const NodalField& v) {
    Vec2 g = Vec2::Zero();
    for (int i = 0; i < 3; ++i)
      g += v[refined.triangles[t][i]] * ops.grad[t].col(i);
    return g;
  };

  Scalar total = 0;
  for (const auto& [edge, tris] : edge_tris) {
    if (tris.size() != 2) continue;
    const int r0 = refined.region[tris[0]], r1 = refined.region[tris[1]];
    if (r0 == r1) continue;
    const int ext = (r0 == 0) ? tris[0] : tris[1];
    const Vec2& p1 = refined.nodes[edge.first];
    const Vec2& p2 = refined.nodes[edge.second];
    const Scalar len = (p2 - p1).norm();
    const Vec2 tau = (p2 - p1) / len;
    Vec2 nu(tau.y(), -tau.x());
    const auto& etr = refined.triangles[ext];
    const Vec2 ext_centroid =
        (refined.nodes[etr[0]] + refined.nodes[etr[1]] +
         refined.nodes[etr[2]]) /
        3.0;
    const Vec2 mid = 0.5 * (p1 + p2);
    if (nu.dot(ext_centroid - mid) < 0) nu = -nu;

    Scalar kernel = 0;
    for (size_t j = 0; j < states.size(); ++j) {
      const Vec2 gu = tri_grad(ext, states[j]);
      const Vec2 gz = tri_grad(ext, adjoints[j]);
      kernel += (1.0 / k) * gu.dot(nu) * gz.dot(nu) +
                gu.dot(tau) * gz.dot(tau);
    }
    const Vec2 u_mid = eval_linear(u, coarse, refined.root[ext], mid);
    total += kernel * u_mid.dot(nu) * len;
  }
  return sigma.background * (k - 1.0) * total;
}

FdCheck fd_check(const Conductivity& sigma, const TriMesh& coarse,
                 const TriMesh& refined,
                 const std::vector<BoundaryFlux>& patterns,
                 const std::vector<Eigen::VectorXd>& data,
                 const DeformationField& u, Scalar t) {
  if (!(t > 0)) throw GradientError("fd_check: t must be positive");
  check_deformation(coarse, u);
  require_nested(coarse, refined);
  const P1Operators cops = p1_operators(coarse);
  Scalar lip = 0;
  for (size_t r = 0; r < coarse.triangles.size(); ++r)
    lip = std::max(lip, jacobian_on_root(u, coarse, cops,
                                         static_cast<int>(r))
                            .norm());
  if (lip > 0 && t > 0.5 / lip)
    throw GradientError("fd_check: t too large for this field");

  const ForwardSolution base = solve_forward(refined, sigma, patterns, data);
  const Scalar analytic = shape_directional(sigma, coarse, refined,
                                            base.states, base.adjoints, u);

  const std::vector<Vec2> disp = deformation_at_nodes(u, coarse, refined);
  auto transported_j = [&](Scalar s) {
    TriMesh moved = refined;
    for (size_t i = 0; i < moved.nodes.size(); ++i)
      moved.nodes[i] += s * disp[i];
    for (size_t tt = 0; tt < moved.triangles.size(); ++tt)
      if (triangle_area(moved, static_cast<int>(tt)) <= 0)
        throw GradientError("fd_check: transported mesh has an inverted "
                            "triangle, reduce t");
    return solve_forward(moved, sigma, patterns, data).j_value;
  };
  const Scalar jp = transported_j(t);
  const Scalar jm = transported_j(-t);
  FdCheck out;
  out.analytic = analytic;
  out.central_fd = (jp - jm) / (2 * t);
  const Scalar ref = std::max(std::abs(out.analytic),
                              std::abs(out.central_fd));
  out.rel_err = ref > 0 ? std::abs(out.analytic - out.central_fd) / ref : 0;
  return out;
}

}  // namespace eit
