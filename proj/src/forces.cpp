// SPDX-License-Identifier: Apache-2.0
#include "sphmp/forces.hpp"

#include <stdexcept>

namespace sphmp {
namespace {

bool same_edges(const DirectedEdgeList& a, const DirectedEdgeList& b) {
  return a.senders == b.senders && a.receivers == b.receivers;
}

}  // namespace

ForceEstimate fd_forces(const ModelParams& params, const Graph3D& graph, double h) {
  if (!(h >= 1e-6 && h <= 1e-3)) throw std::invalid_argument("fd_forces: step must lie in [1e-6, 1e-3]");
  const auto& cfg = params.config();
  const BasisTables tables(cfg.cutoff_c, cfg.n_srbf, cfg.n_shbf);
  const DirectedEdgeList reference = build_radius_graph(graph, cfg.cutoff_c);

  const auto n = graph.size();
  ForceEstimate out;
  out.forces = Eigen::MatrixX3d::Zero(static_cast<Eigen::Index>(n), 3);
  out.crosses_cutoff.assign(n, {false, false, false});
  Graph3D moved = graph;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (int axis = 0; axis < 3; ++axis) {
      const double x0 = graph.positions(row, axis);
      double energy[2];
      bool crossed = false;
      for (int s = 0; s < 2; ++s) {
        moved.positions(row, axis) = x0 + (s == 0 ? h : -h);
        const PreparedGraph pg = prepare_graph(moved, tables);
        crossed = crossed || !same_edges(pg.edges, reference);
        energy[s] = predict(pg, params);
      }
      moved.positions(row, axis) = x0;
      out.forces(row, axis) = -(energy[0] - energy[1]) / (2.0 * h);
      out.crosses_cutoff[i][static_cast<std::size_t>(axis)] = crossed;
      out.any_crossing = out.any_crossing || crossed;
    }
  }
  return out;
}

}  // namespace sphmp
