// SPDX-License-Identifier: Apache-2.0
#include "sphmp/synthetic.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sphmp {

std::string_view to_string(SyntheticTask task) {
  switch (task) {
    case SyntheticTask::Torsion: return "torsion";
    case SyntheticTask::Angles: return "angles";
    case SyntheticTask::Lengths: return "lengths";
  }
  return "?";
}

SyntheticTask parse_synthetic_task(std::string_view text) {
  if (text == "torsion") return SyntheticTask::Torsion;
  if (text == "angles") return SyntheticTask::Angles;
  if (text == "lengths") return SyntheticTask::Lengths;
  throw std::invalid_argument("unknown synthetic task '" + std::string(text) + "' (torsion, angles, lengths)");
}

Eigen::MatrixX3d chain_positions(const ChainParams& p) {
  const auto [ab, bc, cd] = p.lengths;
  const auto [t1, t2] = p.angles;
  const double psi = p.dihedral;
  Eigen::MatrixX3d x(4, 3);
  x.row(0) << ab * std::cos(t1), ab * std::sin(t1), 0.0;
  x.row(1) << 0.0, 0.0, 0.0;
  x.row(2) << bc, 0.0, 0.0;
  x.row(3) << bc - cd * std::cos(t2), cd * std::sin(t2) * std::cos(psi), cd * std::sin(t2) * std::sin(psi);
  return x;
}

double synthetic_target(const ChainParams& p, SyntheticTask task) {
  const double total_length = p.lengths[0] + p.lengths[1] + p.lengths[2];
  switch (task) {
    case SyntheticTask::Torsion: return std::cos(p.dihedral) + 0.1 * total_length;
    case SyntheticTask::Angles: return p.angles[0] + p.angles[1];
    case SyntheticTask::Lengths: return total_length;
  }
  return 0.0;
}

Eigen::Matrix3d random_rotation(CounterRng& rng) {
  Eigen::Quaterniond q;
  do {
    q = Eigen::Quaterniond(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  } while (q.norm() < 1e-6);
  q.normalize();
  return q.toRotationMatrix();
}

std::vector<ChainParams> synthetic_chains(int n_samples, std::uint64_t seed) {
  if (n_samples < 64) throw std::invalid_argument("synthetic task needs at least 64 samples");
  constexpr double deg = std::numbers::pi / 180.0;
  std::vector<ChainParams> out(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    CounterRng rng(seed, fnv1a("chain") ^ splitmix64(static_cast<std::uint64_t>(i)));
    auto& p = out[static_cast<std::size_t>(i)];
    for (auto& l : p.lengths) l = rng.uniform(0.9, 1.1);
    for (auto& a : p.angles) a = rng.uniform(100.0 * deg, 120.0 * deg);
    p.dihedral = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  return out;
}

std::vector<Graph3D> synthetic_torsion_task(int n_samples, std::uint64_t seed, SyntheticTask task) {
  const auto chains = synthetic_chains(n_samples, seed);
  std::vector<Graph3D> out;
  out.reserve(chains.size());
  for (std::size_t i = 0; i < chains.size(); ++i) {
    CounterRng rng(seed, fnv1a("placement") ^ splitmix64(i));
    const Eigen::Matrix3d rot = random_rotation(rng);
    const Eigen::Vector3d shift(rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0));
    Eigen::MatrixX3d x = chain_positions(chains[i]);
    x = ((x * rot.transpose()).rowwise() + shift.transpose()).eval();
    out.push_back(make_graph(std::string(to_string(task)) + "-" + std::to_string(i), {1, 6, 6, 1}, x,
                             synthetic_target(chains[i], task)));
  }
  return out;
}

}  // namespace sphmp
