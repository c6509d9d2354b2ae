#pragma once

#include "eit/fem.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace eit {

struct MeasurementError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One electrode: a sub-interval of one square side.
struct Electrode {
  Side side;
  Scalar t0, t1;  // side-local parameters in [0,1], t0 < t1
};

/// The boundary split into `level` equal electrodes, counterclockwise from
/// (0,0): whole sides, half sides, or quarter sides.
struct ElectrodeLayout {
  int level = 4;
  std::vector<Electrode> electrodes;
};

ElectrodeLayout electrode_layout(int level);

/// All C(level,2) pair patterns: density +1 on electrode a, -1 on electrode
/// b, 0 elsewhere, enumerated lexicographically by (a,b).
std::vector<BoundaryFlux> patterns(int level);

struct NoiseMeta {
  Scalar gamma = 0;
  std::uint64_t seed = 0;
  Scalar achieved_level = 0;
};

/// Synthetic boundary data: voltage traces sampled at the boundary nodes of
/// the generating mesh, counterclockwise from (0,0).
struct MeasurementSet {
  ElectrodeLayout layout;
  std::vector<BoundaryFlux> patterns;
  std::vector<Vec2> boundary_nodes;
  std::vector<Eigen::VectorXd> traces;
  std::optional<NoiseMeta> noise_meta;
};

/// Solves every pattern for the true conductivity on an independent mesh
/// (coarse mesh of the true partition, refined `refine_levels` times) with
/// zero boundary mean, and samples the traces.
MeasurementSet synthesize(const Conductivity& true_sigma, int level,
                          int refine_levels = 4);

/// Uniform noise: every boundary value of pattern j is shifted by
/// eps * ||f_j||_L2(boundary), eps drawn independently per node and pattern
/// from U(-gamma, gamma). Bit-reproducible for a fixed seed. When
/// `global_norm` is set, ||f|| is taken over all patterns jointly instead of
/// per pattern.
MeasurementSet add_noise(const MeasurementSet& ms, Scalar gamma,
                         std::uint64_t seed, bool global_norm = false);

/// Relative L2(boundary) error between a clean and a perturbed set.
Scalar noise_level(const MeasurementSet& clean, const MeasurementSet& noisy);

/// Finds gamma such that the Monte Carlo mean of noise_level over
/// `n_seeds` seeds hits `target` (bisection).
Scalar calibrate_gamma(const MeasurementSet& clean, Scalar target,
                       int n_seeds = 100, std::uint64_t base_seed = 1);

/// Built-in conductivity phantoms: pentagon, nonconvex, heart_lung, square.
Conductivity phantom(const std::string& name);

/// Names of all built-in phantoms.
std::vector<std::string> phantom_names();

/// Data traces interpolated onto the boundary nodes of another mesh
/// (piecewise linear in arclength, periodic).
std::vector<Eigen::VectorXd> interpolate_traces(const MeasurementSet& ms,
                                                const TriMesh& target);

}  // namespace eit
