#pragma once

#include "eit/measurements.hpp"
#include "eit/recon.hpp"

#include <string>

namespace eit {

/// Conductivity map with the electrode layout drawn along the boundary.
std::string svg_conductivity(const Conductivity& sigma,
                             const ElectrodeLayout& layout);

/// Reconstructed partition in black over the target partition in blue.
std::string svg_overlay(const Partition& reconstructed,
                        const Partition* truth);

/// Misfit versus iteration on a log scale.
std::string svg_convergence(const ReconTrace& trace);

}  // namespace eit
