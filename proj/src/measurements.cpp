#include "eit/measurements.hpp"

#include "phantom_assets.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace eit {

namespace {

// uniform in [0,1) from the raw 64-bit stream; the standard distribution
// classes are implementation-defined, this mapping is not
Scalar uniform01(std::mt19937_64& rng) {
  return static_cast<Scalar>(rng() >> 11) * 0x1.0p-53;
}

// boundary quadrature directly from sampled node positions (used when the
// generating mesh is no longer around)
Scalar sampled_l2_norm_sq(const std::vector<Vec2>& nodes,
                          const Eigen::VectorXd& trace) {
  const int n = static_cast<int>(nodes.size());
  Scalar s = 0;
  for (int i = 0; i < n; ++i) {
    const Scalar len = (nodes[(i + 1) % n] - nodes[i]).norm();
    const Scalar a = trace[i], b = trace[(i + 1) % n];
    s += len / 3.0 * (a * a + a * b + b * b);
  }
  return s;
}

}  // namespace

ElectrodeLayout electrode_layout(int level) {
  if (level != 4 && level != 8 && level != 16)
    throw MeasurementError("electrode level must be 4, 8 or 16");
  ElectrodeLayout layout;
  layout.level = level;
  const int per_side = level / 4;
  for (int s = 0; s < 4; ++s)
    for (int k = 0; k < per_side; ++k)
      layout.electrodes.push_back({static_cast<Side>(s),
                                   static_cast<Scalar>(k) / per_side,
                                   static_cast<Scalar>(k + 1) / per_side});
  return layout;
}

std::vector<BoundaryFlux> patterns(int level) {
  if (level != 4 && level != 8 && level != 16)
    throw MeasurementError("electrode level must be 4, 8 or 16");
  std::vector<BoundaryFlux> out;
  out.reserve(level * (level - 1) / 2);
  for (int a = 0; a < level; ++a)
    for (int b = a + 1; b < level; ++b) {
      BoundaryFlux g;
      g.level = level;
      g.electrode_density = Eigen::VectorXd::Zero(level);
      g.electrode_density[a] = 1.0;
      g.electrode_density[b] = -1.0;
      out.push_back(std::move(g));
    }
  return out;
}

MeasurementSet synthesize(const Conductivity& true_sigma, int level,
                          int refine_levels) {
  check_conductivity(true_sigma);
  const TriMesh coarse = coarse_mesh(true_sigma.partition, level);
  const TriMesh fine = refine(coarse, refine_levels);
  const BoundarySampling bs = boundary_sampling(fine);

  MeasurementSet ms;
  ms.layout = electrode_layout(level);
  ms.patterns = patterns(level);
  ms.boundary_nodes.reserve(bs.nodes.size());
  for (int node : bs.nodes) ms.boundary_nodes.push_back(fine.nodes[node]);

  const P1Operators ops = p1_operators(fine);
  const NeumannSolver solver(fine, assemble(fine, true_sigma, ops));
  const int M = static_cast<int>(ms.patterns.size());
  Eigen::MatrixXd loads(fine.nodes.size(), M);
  for (int j = 0; j < M; ++j) loads.col(j) = solver.flux_load(ms.patterns[j]);
  const Eigen::MatrixXd states =
      solver.solve_many(loads, Eigen::VectorXd::Zero(M));
  ms.traces.reserve(M);
  for (int j = 0; j < M; ++j)
    ms.traces.push_back(boundary_trace(fine, bs, states.col(j)));
  return ms;
}

MeasurementSet add_noise(const MeasurementSet& ms, Scalar gamma,
                         std::uint64_t seed, bool global_norm) {
  if (gamma < 0) throw MeasurementError("add_noise: gamma must be >= 0");
  if (ms.noise_meta)
    throw MeasurementError("add_noise: input already carries noise");
  MeasurementSet out = ms;
  if (gamma == 0) return out;

  Scalar global = 0;
  if (global_norm) {
    for (const auto& f : ms.traces)
      global += sampled_l2_norm_sq(ms.boundary_nodes, f);
    global = std::sqrt(global);
  }

  std::mt19937_64 rng(seed);
  for (size_t j = 0; j < out.traces.size(); ++j) {
    const Scalar norm =
        global_norm ? global
                    : std::sqrt(sampled_l2_norm_sq(ms.boundary_nodes,
                                                   ms.traces[j]));
    for (Eigen::Index i = 0; i < out.traces[j].size(); ++i) {
      const Scalar eps = gamma * (2.0 * uniform01(rng) - 1.0);
      out.traces[j][i] += eps * norm;
    }
  }
  NoiseMeta meta;
  meta.gamma = gamma;
  meta.seed = seed;
  meta.achieved_level = noise_level(ms, out);
  out.noise_meta = meta;
  return out;
}

Scalar noise_level(const MeasurementSet& clean, const MeasurementSet& noisy) {
  if (clean.layout.level != noisy.layout.level ||
      clean.traces.size() != noisy.traces.size() ||
      clean.boundary_nodes.size() != noisy.boundary_nodes.size())
    throw MeasurementError("noise_level: mismatched measurement sets");
  Scalar num = 0, den = 0;
  for (size_t j = 0; j < clean.traces.size(); ++j) {
    if (clean.traces[j].size() != noisy.traces[j].size())
      throw MeasurementError("noise_level: mismatched trace sampling");
    num += sampled_l2_norm_sq(clean.boundary_nodes,
                              noisy.traces[j] - clean.traces[j]);
    den += sampled_l2_norm_sq(clean.boundary_nodes, clean.traces[j]);
  }
  if (den == 0) throw MeasurementError("noise_level: zero reference data");
  return std::sqrt(num / den);
}

Scalar calibrate_gamma(const MeasurementSet& clean, Scalar target,
                       int n_seeds, std::uint64_t base_seed) {
  if (!(target > 0)) throw MeasurementError("calibrate_gamma: target must be > 0");
  auto mean_level = [&](Scalar gamma) {
    Scalar s = 0;
    for (int k = 0; k < n_seeds; ++k)
      s += add_noise(clean, gamma, base_seed + k).noise_meta->achieved_level;
    return s / n_seeds;
  };
  // achieved level is linear in gamma in expectation: bracket then bisect
  Scalar lo = 0, hi = std::max(target, Scalar(1e-4));
  while (mean_level(hi) < target) {
    hi *= 2;
    if (hi > 1e3) throw MeasurementError("calibrate_gamma: bracketing failed");
  }
  for (int it = 0; it < 40; ++it) {
    const Scalar mid = 0.5 * (lo + hi);
    if (mean_level(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<std::string> phantom_names() {
  return {"pentagon", "nonconvex", "heart_lung", "square"};
}

Conductivity phantom(const std::string& name) {
  const auto doc = nlohmann::json::parse(detail::kPhantomAssetsJson);
  const auto& all = doc.at("phantoms");
  if (!all.contains(name))
    throw MeasurementError("unknown phantom: " + name);
  const auto& ph = all.at(name);
  Conductivity sigma;
  sigma.background = ph.at("background").get<Scalar>();
  const auto& incs = ph.at("inclusions");
  sigma.values.resize(incs.size());
  int i = 0;
  for (const auto& inc : incs) {
    Polygon poly;
    for (const auto& v : inc.at("vertices"))
      poly.vertices.emplace_back(v.at(0).get<Scalar>(), v.at(1).get<Scalar>());
    sigma.partition.inclusions.push_back(std::move(poly));
    sigma.values[i++] = inc.at("value").get<Scalar>();
  }
  check_conductivity(sigma);
  return sigma;
}

std::vector<Eigen::VectorXd> interpolate_traces(const MeasurementSet& ms,
                                                const TriMesh& target) {
  const BoundarySampling bs = boundary_sampling(target);
  const int ns = static_cast<int>(ms.boundary_nodes.size());
  std::vector<Scalar> s_src(ns);
  for (int i = 0; i < ns; ++i)
    s_src[i] = boundary_arclength(ms.boundary_nodes[i]);
  // piecewise linear in arclength, periodic with period 4
  auto eval = [&](const Eigen::VectorXd& f, Scalar s) {
    const auto it = std::upper_bound(s_src.begin(), s_src.end(), s);
    const int hi = static_cast<int>(it - s_src.begin()) % ns;
    const int lo = (hi + ns - 1) % ns;
    Scalar s0 = s_src[lo], s1 = s_src[hi];
    Scalar sq = s;
    if (s1 <= s0) {  // wrap-around interval
      s1 += 4;
      if (sq < s0) sq += 4;
    }
    const Scalar w = (sq - s0) / (s1 - s0);
    return (1 - w) * f[lo] + w * f[hi];
  };
  std::vector<Eigen::VectorXd> out;
  out.reserve(ms.traces.size());
  for (const auto& f : ms.traces) {
    Eigen::VectorXd g(bs.nodes.size());
    for (size_t i = 0; i < bs.nodes.size(); ++i)
      g[i] = eval(f, bs.arclength[i]);
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace eit
