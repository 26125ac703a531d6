// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sphmp/network.hpp"

#include <Eigen/Core>

#include <vector>

namespace sphmp {

struct ForceEstimate {
  Eigen::MatrixX3d forces;  // -dE/dr by central differences
  /// Per (atom, axis): a displacement changed the edge set, so the estimate spans
  /// a discontinuity of the energy.
  std::vector<std::array<bool, 3>> crosses_cutoff;
  bool any_crossing = false;
};

/// Throws std::invalid_argument unless h is in [1e-6, 1e-3] Å.
ForceEstimate fd_forces(const ModelParams& params, const Graph3D& graph, double h);

}  // namespace sphmp
