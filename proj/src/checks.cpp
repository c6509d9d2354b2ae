#include "eit/checks.hpp"

#include <chrono>
#include <cmath>

namespace eit {

namespace {

InitialGuess trial_guess_for(const std::string& phantom_name) {
  // reconstruction starting points used throughout the experiments
  if (phantom_name == "pentagon")
    return {{{Vec2(0.5, 0.5), 0.25, 14, 10.0}}, 1.0};
  if (phantom_name == "nonconvex")
    return {{{Vec2(0.5, 0.5), 0.25, 24, 10.0}}, 1.0};
  if (phantom_name == "heart_lung")
    return {{{Vec2(0.29, 0.55), 0.12, 16, 0.5},
             {Vec2(0.71, 0.55), 0.12, 16, 0.5},
             {Vec2(0.50, 0.33), 0.12, 16, 2.0}},
            1.0};
  if (phantom_name == "square")
    return {{{Vec2(0.30, 0.70), 0.15, 8, 10.0}}, 1.0};
  throw MeasurementError("no trial guess for phantom " + phantom_name);
}

struct TrialSetup {
  Conductivity sigma;
  TriMesh coarse;
  TriMesh refined;
  std::vector<BoundaryFlux> pats;
  std::vector<Eigen::VectorXd> data;
};

TrialSetup make_trial(const std::string& phantom_name, int level,
                      int refine_levels) {
  TrialSetup ts;
  const Conductivity truth = phantom(phantom_name);
  const MeasurementSet ms = synthesize(truth, level, 4);
  ts.sigma = initial_guess(trial_guess_for(phantom_name));
  ts.coarse = coarse_mesh(ts.sigma.partition, level);
  ts.refined = refine(ts.coarse, refine_levels);
  ts.pats = ms.patterns;
  ts.data = interpolate_traces(ms, ts.refined);
  return ts;
}

}  // namespace

FemCheck check_fem_manufactured(int refine_levels) {
  const auto t0 = std::chrono::steady_clock::now();
  Conductivity sigma;  // no inclusions, sigma = 1 everywhere
  sigma.background = 1.0;
  sigma.values.resize(0);
  const TriMesh coarse = coarse_mesh(sigma.partition, 4);
  const TriMesh mesh = refine(coarse, refine_levels);

  BoundaryFlux g;
  g.level = 4;
  g.electrode_density = Eigen::VectorXd::Zero(4);
  g.electrode_density[3] = 1.0;   // left side, flux in
  g.electrode_density[1] = -1.0;  // right side, flux out

  const P1Operators ops = p1_operators(mesh);
  const NeumannSolver solver(mesh, assemble(mesh, sigma, ops));
  // exact solution 1/2 - x has zero boundary integral
  const NodalField u = solver.solve(solver.flux_load(g), 0.0);

  FemCheck out;
  for (size_t i = 0; i < mesh.nodes.size(); ++i)
    out.max_node_error = std::max(
        out.max_node_error, std::abs(u[i] - (0.5 - mesh.nodes[i].x())));
  out.runtime_sec = std::chrono::duration<Scalar>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  out.pass = out.max_node_error <= 1e-10 && out.runtime_sec < 1.0;
  return out;
}

FdCheckSweep check_fd(const std::string& phantom_name, int n_fields, Scalar t,
                      Scalar tolerance, int refine_levels,
                      std::uint64_t seed) {
  const TrialSetup ts = make_trial(phantom_name, 4, refine_levels);

  FdCheckSweep out;
  for (int k = 0; k < n_fields; ++k) {
    const DeformationField u = random_deformation(ts.coarse, seed + k, 0.5);
    out.fields.push_back(
        fd_check(ts.sigma, ts.coarse, ts.refined, ts.pats, ts.data, u, t));
    out.max_rel_err = std::max(out.max_rel_err, out.fields.back().rel_err);
  }
  const DeformationField u0 = random_deformation(ts.coarse, seed, 0.5);
  out.rel_err_coarse_t =
      fd_check(ts.sigma, ts.coarse, ts.refined, ts.pats, ts.data, u0, 1e-3)
          .rel_err;
  out.rel_err_fine_t =
      fd_check(ts.sigma, ts.coarse, ts.refined, ts.pats, ts.data, u0, 1e-4)
          .rel_err;
  out.order_ratio = out.rel_err_coarse_t /
                    std::max(out.rel_err_fine_t, Scalar(1e-300));
  // O(t^2) central differences: one decade in t is two decades in error
  out.pass = out.max_rel_err <= tolerance && out.order_ratio > 30.0;
  return out;
}

CoeffCheck check_coeff(const std::string& phantom_name, Scalar tolerance,
                       int refine_levels) {
  TrialSetup ts = make_trial(phantom_name, 4, refine_levels);
  // move the trial values off the optimum so the gradient is well scaled
  for (Eigen::Index i = 0; i < ts.sigma.values.size(); ++i)
    ts.sigma.values[i] *= 1.25;

  const ForwardSolution sol =
      solve_forward(ts.refined, ts.sigma, ts.pats, ts.data);
  const CoeffGradient grad =
      coeff_gradient(ts.refined, sol.states, sol.adjoints);

  const int nr = region_count(ts.sigma);
  CoeffCheck out;
  out.analytic = grad.d;
  out.central_fd.resize(nr);
  auto j_of = [&](const Conductivity& s) {
    return solve_forward(ts.refined, s, ts.pats, ts.data).j_value;
  };
  for (int r = 0; r < nr; ++r) {
    const Scalar base = sigma_of_region(ts.sigma, r);
    const Scalar h = 1e-6 * base;
    Conductivity sp = ts.sigma, sm = ts.sigma;
    if (r == 0) {
      sp.background = base + h;
      sm.background = base - h;
    } else {
      sp.values[r - 1] = base + h;
      sm.values[r - 1] = base - h;
    }
    out.central_fd[r] = (j_of(sp) - j_of(sm)) / (2 * h);
    const Scalar ref =
        std::max(std::abs(out.analytic[r]), std::abs(out.central_fd[r]));
    if (ref > 0)
      out.max_rel_err = std::max(
          out.max_rel_err, std::abs(out.analytic[r] - out.central_fd[r]) / ref);
  }
  out.pass = out.max_rel_err <= tolerance;
  return out;
}

BoundaryCheck check_boundary_equivalence(Scalar tolerance, int max_level,
                                         std::uint64_t seed) {
  // trial: a square inclusion with contrast 10 displaced from the target
  Conductivity trial;
  trial.background = 1.0;
  trial.values.resize(1);
  trial.values[0] = 10.0;
  trial.partition.inclusions.push_back(
      Polygon{{Vec2(0.30, 0.40), Vec2(0.60, 0.40), Vec2(0.60, 0.70),
               Vec2(0.30, 0.70)}});

  const Conductivity truth = phantom("square");
  const MeasurementSet ms = synthesize(truth, 4, 4);
  const TriMesh coarse = coarse_mesh(trial.partition, 4);
  const DeformationField u = random_deformation(coarse, seed, 0.5);

  BoundaryCheck out;
  for (int level = 1; level <= max_level; ++level) {
    const TriMesh refined = refine(coarse, level);
    const std::vector<Eigen::VectorXd> data = interpolate_traces(ms, refined);
    const ForwardSolution sol =
        solve_forward(refined, trial, ms.patterns, data);
    const Scalar dist = shape_directional(trial, coarse, refined, sol.states,
                                          sol.adjoints, u);
    const Scalar bnd = boundary_shape_directional(trial, coarse, refined,
                                                  sol.states, sol.adjoints, u);
    out.relative_gap.push_back(std::abs(dist - bnd) /
                               std::max(std::abs(dist), Scalar(1e-300)));
  }
  out.gap_at_level3 =
      max_level >= 3 ? out.relative_gap[2] : out.relative_gap.back();
  out.monotone = true;
  for (size_t i = 1; i < out.relative_gap.size(); ++i)
    if (out.relative_gap[i] > out.relative_gap[i - 1]) out.monotone = false;
  out.pass = out.gap_at_level3 <= tolerance && out.monotone;
  return out;
}

}  // namespace eit
