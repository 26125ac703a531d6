// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sphmp/ingest.hpp"
#include "sphmp/rng.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace sphmp {

enum class SyntheticTask {
  Torsion,  // cos ψ + 0.1 Σ bond lengths
  Angles,   // sum of the two bond angles (rad)
  Lengths,  // sum of the three bond lengths
};

std::string_view to_string(SyntheticTask task);
SyntheticTask parse_synthetic_task(std::string_view text);

/// Internal coordinates of a 4-atom chain a-b-c-d.
struct ChainParams {
  std::array<double, 3> lengths{};  // ab, bc, cd (Å)
  std::array<double, 2> angles{};   // a-b-c, b-c-d (rad)
  double dihedral = 0.0;            // ψ, rad; 0 is the cis arrangement
};

/// Z = (1, 6, 6, 1); b at the origin, c on +x, a in the xy half-plane y > 0.
Eigen::MatrixX3d chain_positions(const ChainParams& p);
double synthetic_target(const ChainParams& p, SyntheticTask task);

/// Haar-random proper rotation from a normalized Gaussian quaternion.
Eigen::Matrix3d random_rotation(CounterRng& rng);

/// Lengths in [0.9, 1.1] Å, angles in [100°, 120°], ψ uniform in [0, 2π); each
/// chain is placed by a random rigid motion. Throws std::invalid_argument for n < 64.
std::vector<ChainParams> synthetic_chains(int n_samples, std::uint64_t seed);
std::vector<Graph3D> synthetic_torsion_task(int n_samples, std::uint64_t seed,
                                            SyntheticTask task = SyntheticTask::Torsion);

}  // namespace sphmp
