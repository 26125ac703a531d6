// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sphmp/ingest.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace sphmp {

/// Directed radius graph. Edge k carries a message from senders[k] to receivers[k].
/// Edges are sorted by (receiver, sender), so the incoming edges of node i are the
/// contiguous range [incoming_offsets[i], incoming_offsets[i + 1]).
struct DirectedEdgeList {
  std::vector<int> senders;
  std::vector<int> receivers;
  std::vector<double> distances;
  std::vector<std::size_t> incoming_offsets;

  std::size_t size() const { return senders.size(); }
  std::size_t num_nodes() const { return incoming_offsets.empty() ? 0 : incoming_offsets.size() - 1; }
};

/// Two-hop message paths: pair p couples edge k = edge_k[p] with an incoming edge
/// j = edge_j[p] of its sender (receivers[j] == senders[k], senders[j] != receivers[k]).
/// Pairs are sorted by (k, j); pairs of edge k occupy [offsets[k], offsets[k + 1]).
struct TwoHopIndex {
  std::vector<std::size_t> edge_k;
  std::vector<std::size_t> edge_j;
  std::vector<std::size_t> offsets;

  std::size_t size() const { return edge_k.size(); }
};

struct TorsionResult {
  std::vector<double> phi;               // per pair, radians
  std::vector<int> neighbor_count;       // per edge: t
  std::vector<std::size_t> collinear;    // pair indices whose neighbor lies on the edge axis
};

/// Complete (d, θ, φ) description of every two-hop path of a graph.
struct TwoHopGeometry {
  TwoHopIndex pairs;
  std::vector<double> theta;
  std::vector<double> phi;
  std::vector<int> neighbor_count;
  std::vector<std::size_t> collinear;
};

inline constexpr double kCollinearTolerance = 1e-8;  // Å, projected-neighbor norm
inline constexpr double kAzimuthTieTolerance = 1e-9;  // rad

/// Contains (i -> j) iff 0 < |r_i - r_j| <= cutoff. O(n^2) scan.
DirectedEdgeList build_radius_graph(const Graph3D& g, double cutoff);

TwoHopIndex build_two_hop_index(const DirectedEdgeList& edges);

/// Angle at s_k between the direction to r_k and the direction to s_j, in [0, π].
std::vector<double> compute_angles(const Graph3D& g, const DirectedEdgeList& edges, const TwoHopIndex& pairs);

/// Torsion of each pair: the azimuthal gap, about the s_k -> r_k axis, between the
/// pair's neighbor and its predecessor in anticlockwise order. Gaps around one edge
/// sum to 2π when at least two neighbors are off-axis; a lone neighbor gets 0.
TorsionResult compute_torsions(const Graph3D& g, const DirectedEdgeList& edges, const TwoHopIndex& pairs);

TwoHopGeometry compute_two_hop_geometry(const Graph3D& g, const DirectedEdgeList& edges);

/// r -> R r + t. R must be a proper rotation (orthogonal within 1e-12, det +1).
Graph3D rigid_transform(const Graph3D& g, const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

}  // namespace sphmp
