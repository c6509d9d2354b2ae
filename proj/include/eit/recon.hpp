#pragma once

#include "eit/gradients.hpp"
#include "eit/measurements.hpp"

#include <optional>

namespace eit {

struct ReconConfig {
  Scalar alpha = 0.5;          // coefficient step
  Scalar beta = 0.05;          // vertex step
  Scalar delta1_factor = 0.9;  // delta1 = factor * initial side length
  Scalar delta2_factor = 1.8;
  Scalar tol = 0.004;          // stop when max_l |theta_l| <= tol
  int max_iter = 1000;
  int refine_levels = 3;
  bool values_known = false;
  bool background_known = true;
  Scalar sigma_min = kSigmaMin;
  Scalar sigma_max = kSigmaMax;
  int snapshot_every = 10;
};

struct IterationRecord {
  int iter = 0;
  Scalar j_value = 0;
  Eigen::VectorXd values;
  Scalar background = 1;
  std::vector<int> vertex_counts;
  Scalar max_theta = 0;
  Scalar effective_beta = 0;
  std::optional<Partition> snapshot;
};

enum class StopReason { converged, max_iter, step_collapsed, error };

const char* to_string(StopReason r);

struct ReconTrace {
  std::vector<IterationRecord> records;
  StopReason stop = StopReason::max_iter;
  std::string message;
};

/// Regular-polygon initial guess: per inclusion a center, radius, side
/// count and conductivity value.
struct NGonSpec {
  Vec2 center;
  Scalar radius;
  int n_sides;
  Scalar value;
};

struct InitialGuess {
  std::vector<NGonSpec> ngons;
  Scalar background = 1.0;
};

/// Materializes the guess; throws when the polygons overlap or touch the
/// boundary.
Conductivity initial_guess(const InitialGuess& guess);

/// Side length of the first guess polygon (the regularization unit delta).
Scalar guess_side_length(const InitialGuess& guess);

struct ReconResult {
  Conductivity sigma;
  ReconTrace trace;
};

/// Gradient-descent reconstruction: per iteration one regularization pass,
/// coarse mesh + nested refinement, all state and adjoint solves, coefficient
/// update (unless values are known; the background only when unknown) and a
/// joint vertex move, until max_l |theta_l| <= tol or max_iter. Mesh or
/// solver failures end the run with StopReason::error and the trace so far.
ReconResult reconstruct(const MeasurementSet& data, const InitialGuess& guess,
                        const ReconConfig& cfg);

struct VariantSpec {
  Scalar noise_target = 0;  // relative L2 level; 0 = noiseless
  int level = 4;
  bool values_known = true;
  Scalar tol = -1;  // override when > 0
  std::uint64_t seed = 0;
};

struct VariantResult {
  bool ok = false;
  std::string error;
  ReconResult result;
  Scalar achieved_noise = 0;
};

/// Deterministic batch execution; per-variant failures are isolated.
std::vector<VariantResult> run_variants(const Conductivity& truth,
                                        const InitialGuess& guess,
                                        const ReconConfig& base,
                                        const std::vector<VariantSpec>& specs,
                                        int synth_refine = 4);

}  // namespace eit
