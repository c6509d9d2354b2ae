#include "eit/recon.hpp"

#include <algorithm>
#include <cmath>

namespace eit {

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::max_iter: return "max_iter";
    case StopReason::step_collapsed: return "step_collapsed";
    case StopReason::error: return "error";
  }
  return "unknown";
}

Conductivity initial_guess(const InitialGuess& guess) {
  if (guess.ngons.empty())
    throw GeometryError("initial_guess: at least one polygon required");
  Conductivity sigma;
  sigma.background = guess.background;
  sigma.values.resize(guess.ngons.size());
  int i = 0;
  for (const NGonSpec& spec : guess.ngons) {
    sigma.partition.inclusions.push_back(
        regular_ngon(spec.center, spec.radius, spec.n_sides));
    sigma.values[i++] = spec.value;
  }
  const PolygonCheck pc = partition_validate(sigma.partition);
  if (!pc.ok) throw GeometryError("initial_guess: " + pc.reason);
  check_conductivity(sigma);
  return sigma;
}

Scalar guess_side_length(const InitialGuess& guess) {
  if (guess.ngons.empty())
    throw GeometryError("guess_side_length: empty guess");
  const NGonSpec& s = guess.ngons.front();
  return 2.0 * s.radius * std::sin(M_PI / s.n_sides);
}

ReconResult reconstruct(const MeasurementSet& data, const InitialGuess& guess,
                        const ReconConfig& cfg) {
  Conductivity sigma = initial_guess(guess);
  const Scalar delta = guess_side_length(guess);
  const RegularizationParams reg{cfg.delta1_factor * delta,
                                 cfg.delta2_factor * delta};

  ReconResult out;
  out.trace.stop = StopReason::max_iter;

  auto clamp_value = [&](Scalar v, Scalar other) {
    v = std::clamp(v, cfg.sigma_min, cfg.sigma_max);
    if (v == other) v = std::nextafter(v, v > cfg.sigma_min ? 0.0 : 1e9);
    return v;
  };

  for (int k = 0; k < cfg.max_iter; ++k) {
    IterationRecord rec;
    rec.iter = k;
    try {
      sigma.partition = regularize(sigma.partition, reg);
      const TriMesh coarse = coarse_mesh(sigma.partition, data.layout.level);
      const TriMesh refined = refine(coarse, cfg.refine_levels);
      const std::vector<Eigen::VectorXd> f = interpolate_traces(data, refined);
      const ForwardSolution sol =
          solve_forward(refined, sigma, data.patterns, f);
      const ShapeGradient theta =
          vertex_descent(sigma, coarse, refined, sol.states, sol.adjoints);

      rec.j_value = sol.j_value;
      rec.values = sigma.values;
      rec.background = sigma.background;
      for (const Polygon& p : sigma.partition.inclusions)
        rec.vertex_counts.push_back(static_cast<int>(p.vertices.size()));
      rec.max_theta = theta.max_norm();

      if (!cfg.values_known) {
        const CoeffGradient cg =
            coeff_gradient(refined, sol.states, sol.adjoints);
        for (Eigen::Index i = 0; i < sigma.values.size(); ++i)
          sigma.values[i] = clamp_value(
              sigma.values[i] - cfg.alpha * cg.d[i + 1], sigma.background);
        if (!cfg.background_known)
          sigma.background =
              std::clamp(sigma.background - cfg.alpha * cg.d[0],
                         cfg.sigma_min, cfg.sigma_max);
      }

      bool collapsed = false;
      try {
        MoveResult mv = move_vertices(sigma.partition, theta.theta, cfg.beta);
        rec.effective_beta = mv.effective_beta;
        sigma.partition = std::move(mv.partition);
      } catch (const GeometryError& e) {
        collapsed = true;
        out.trace.message = e.what();
      }

      if (cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0)
        rec.snapshot = sigma.partition;
      const Scalar max_theta = rec.max_theta;
      out.trace.records.push_back(std::move(rec));

      if (collapsed) {
        out.trace.stop = StopReason::step_collapsed;
        break;
      }
      if (max_theta <= cfg.tol) {
        out.trace.stop = StopReason::converged;
        break;
      }
    } catch (const std::exception& e) {
      out.trace.stop = StopReason::error;
      out.trace.message = e.what();
      break;
    }
  }

  out.sigma = sigma;
  return out;
}

std::vector<VariantResult> run_variants(const Conductivity& truth,
                                        const InitialGuess& guess,
                                        const ReconConfig& base,
                                        const std::vector<VariantSpec>& specs,
                                        int synth_refine) {
  std::vector<VariantResult> out;
  out.reserve(specs.size());
  for (const VariantSpec& v : specs) {
    VariantResult r;
    try {
      MeasurementSet ms = synthesize(truth, v.level, synth_refine);
      if (v.noise_target > 0) {
        const Scalar gamma =
            calibrate_gamma(ms, v.noise_target, 100, v.seed + 1);
        ms = add_noise(ms, gamma, v.seed);
        r.achieved_noise = ms.noise_meta->achieved_level;
      }
      ReconConfig cfg = base;
      cfg.values_known = v.values_known;
      if (v.tol > 0) cfg.tol = v.tol;
      r.result = reconstruct(ms, guess, cfg);
      r.ok = r.result.trace.stop != StopReason::error;
      if (!r.ok) r.error = r.result.trace.message;
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace eit
