#pragma once

#include "eit/recon.hpp"

#include <string>

namespace eit {

/// Verification harnesses backing the `verify` CLI command and the
/// acceptance suite. Every check reports its measured errors together with
/// the tolerance it was held to.

struct FemCheck {
  Scalar max_node_error = 0;  // against the exact linear solution
  Scalar runtime_sec = 0;
  bool pass = false;
};

/// sigma = 1, unit flux in through the left side and out through the right:
/// the solution 1/2 - x lies in the P1 space and must be reproduced at every
/// node to 1e-10.
FemCheck check_fem_manufactured(int refine_levels = 3);

struct FdCheckSweep {
  std::vector<FdCheck> fields;     // one random admissible field each
  Scalar max_rel_err = 0;
  Scalar rel_err_coarse_t = 0;     // at t = 1e-3
  Scalar rel_err_fine_t = 0;       // at t = 1e-4
  Scalar order_ratio = 0;          // coarse/fine, approx 100 for O(t^2)
  bool pass = false;
};

/// Transported-mesh central differences against the distributed formula on
/// a trial guess for the named phantom's data.
FdCheckSweep check_fd(const std::string& phantom_name, int n_fields = 20,
                      Scalar t = 1e-5, Scalar tolerance = 1e-4,
                      int refine_levels = 3, std::uint64_t seed = 2026);

struct CoeffCheck {
  Eigen::VectorXd analytic;
  Eigen::VectorXd central_fd;
  Scalar max_rel_err = 0;
  bool pass = false;
};

/// Region-value gradient against central differences of the misfit,
/// h = 1e-6 * sigma_r per region.
CoeffCheck check_coeff(const std::string& phantom_name,
                       Scalar tolerance = 1e-6, int refine_levels = 3);

struct BoundaryCheck {
  std::vector<Scalar> relative_gap;  // refinement levels 1..max_level
  Scalar gap_at_level3 = 0;
  bool monotone = false;
  bool pass = false;
};

/// Distributed versus boundary-jump form of the shape derivative for a
/// single square-like inclusion with contrast 10, over nested refinements.
BoundaryCheck check_boundary_equivalence(Scalar tolerance = 0.05,
                                         int max_level = 4,
                                         std::uint64_t seed = 7);

}  // namespace eit
