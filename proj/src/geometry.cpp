// SPDX-License-Identifier: Apache-2.0
#include "sphmp/geometry.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sphmp {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::Vector3d pos(const Graph3D& g, int i) { return g.positions.row(i).transpose(); }

// Orthonormal in-plane basis (e1, e2) with e1 x e2 = u.
void plane_basis(const Eigen::Vector3d& u, Eigen::Vector3d& e1, Eigen::Vector3d& e2) {
  Eigen::Index axis = 0;
  u.cwiseAbs().minCoeff(&axis);
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  a(axis) = 1.0;
  e1 = (a - a.dot(u) * u).normalized();
  e2 = u.cross(e1);
}

struct Neighbor {
  std::size_t pair;
  int node;
  double azimuth;
  double distance;
  double theta;
};

// Orders members of one azimuth cluster: distance, then angle, then node index.
bool tie_less(const Neighbor& a, const Neighbor& b) {
  if (std::abs(a.distance - b.distance) > kAzimuthTieTolerance) return a.distance < b.distance;
  if (std::abs(a.theta - b.theta) > kAzimuthTieTolerance) return a.theta < b.theta;
  return a.node < b.node;
}

void insertion_sort(std::vector<Neighbor>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    for (std::size_t j = i; j > 0 && tie_less(v[j], v[j - 1]); --j) std::swap(v[j], v[j - 1]);
  }
}

}  // namespace

DirectedEdgeList build_radius_graph(const Graph3D& g, double cutoff) {
  if (!(cutoff > 0)) throw std::invalid_argument("cutoff must be > 0");
  const int n = static_cast<int>(g.size());
  DirectedEdgeList out;
  out.incoming_offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int r = 0; r < n; ++r) {
    for (int s = 0; s < n; ++s) {
      if (s == r) continue;
      const double d = (g.positions.row(r) - g.positions.row(s)).norm();
      if (d > 0 && d <= cutoff) {
        out.senders.push_back(s);
        out.receivers.push_back(r);
        out.distances.push_back(d);
      }
    }
    out.incoming_offsets[static_cast<std::size_t>(r) + 1] = out.senders.size();
  }
  return out;
}

TwoHopIndex build_two_hop_index(const DirectedEdgeList& edges) {
  TwoHopIndex idx;
  idx.offsets.reserve(edges.size() + 1);
  idx.offsets.push_back(0);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto s = static_cast<std::size_t>(edges.senders[k]);
    for (std::size_t j = edges.incoming_offsets[s]; j < edges.incoming_offsets[s + 1]; ++j) {
      if (edges.senders[j] == edges.receivers[k]) continue;
      idx.edge_k.push_back(k);
      idx.edge_j.push_back(j);
    }
    idx.offsets.push_back(idx.edge_k.size());
  }
  return idx;
}

std::vector<double> compute_angles(const Graph3D& g, const DirectedEdgeList& edges, const TwoHopIndex& pairs) {
  std::vector<double> theta(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto k = pairs.edge_k[p];
    const auto j = pairs.edge_j[p];
    const Eigen::Vector3d origin = pos(g, edges.senders[k]);
    const Eigen::Vector3d a = pos(g, edges.receivers[k]) - origin;
    const Eigen::Vector3d b = pos(g, edges.senders[j]) - origin;
    // atan2 form stays accurate near 0 and π, where arccos loses half the digits.
    theta[p] = std::atan2(a.cross(b).norm(), a.dot(b));
  }
  return theta;
}

TorsionResult compute_torsions(const Graph3D& g, const DirectedEdgeList& edges, const TwoHopIndex& pairs) {
  TorsionResult out;
  out.phi.assign(pairs.size(), 0.0);
  out.neighbor_count.assign(edges.size(), 0);

  std::vector<Neighbor> ring;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::size_t begin = pairs.offsets[k];
    const std::size_t end = pairs.offsets[k + 1];
    out.neighbor_count[k] = static_cast<int>(end - begin);
    if (end == begin) continue;

    const Eigen::Vector3d origin = pos(g, edges.senders[k]);
    const Eigen::Vector3d axis_vec = pos(g, edges.receivers[k]) - origin;
    const Eigen::Vector3d u = axis_vec.normalized();
    Eigen::Vector3d e1, e2;
    plane_basis(u, e1, e2);

    ring.clear();
    for (std::size_t p = begin; p < end; ++p) {
      const int q = edges.senders[pairs.edge_j[p]];
      const Eigen::Vector3d w = pos(g, q) - origin;
      const Eigen::Vector3d w_perp = w - w.dot(u) * u;
      if (w_perp.norm() < kCollinearTolerance) {
        out.collinear.push_back(p);
        continue;
      }
      double az = std::atan2(w_perp.dot(e2), w_perp.dot(e1));
      if (az < 0) az += kTwoPi;
      if (az >= kTwoPi) az -= kTwoPi;
      ring.push_back({p, q, az, w.norm(), std::atan2(axis_vec.cross(w).norm(), axis_vec.dot(w))});
    }
    if (ring.size() < 2) continue;  // lone off-axis neighbor keeps φ = 0

    std::sort(ring.begin(), ring.end(), [](const Neighbor& a, const Neighbor& b) {
      return a.azimuth != b.azimuth ? a.azimuth < b.azimuth : a.pair < b.pair;
    });

    // Group numerically coincident azimuths so the gap assignment cannot flip under
    // rounding; a cluster wrapping through 2π -> 0 is merged into the first one.
    std::vector<std::vector<Neighbor>> clusters;
    std::vector<double> rep;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      if (i == 0 || ring[i].azimuth - ring[i - 1].azimuth > kAzimuthTieTolerance) {
        clusters.emplace_back();
        rep.push_back(ring[i].azimuth);
      }
      clusters.back().push_back(ring[i]);
    }
    if (clusters.size() >= 2 && ring.front().azimuth + kTwoPi - ring.back().azimuth <= kAzimuthTieTolerance) {
      auto& last = clusters.back();
      last.insert(last.end(), clusters.front().begin(), clusters.front().end());
      clusters.front() = std::move(last);
      rep.front() = rep.back() - kTwoPi;
      clusters.pop_back();
      rep.pop_back();
    }

    const std::size_t nc = clusters.size();
    for (std::size_t c = 0; c < nc; ++c) {
      insertion_sort(clusters[c]);
      const double gap = nc == 1 ? kTwoPi : (c == 0 ? rep[0] + kTwoPi - rep[nc - 1] : rep[c] - rep[c - 1]);
      out.phi[clusters[c].front().pair] = gap;
      // remaining members of a cluster sit at zero gap behind their lead
    }
  }
  return out;
}

TwoHopGeometry compute_two_hop_geometry(const Graph3D& g, const DirectedEdgeList& edges) {
  TwoHopGeometry geo;
  geo.pairs = build_two_hop_index(edges);
  geo.theta = compute_angles(g, edges, geo.pairs);
  auto tor = compute_torsions(g, edges, geo.pairs);
  geo.phi = std::move(tor.phi);
  geo.neighbor_count = std::move(tor.neighbor_count);
  geo.collinear = std::move(tor.collinear);
  return geo;
}

Graph3D rigid_transform(const Graph3D& g, const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation) {
  const double ortho_err = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (!(ortho_err <= 1e-12)) throw std::invalid_argument("rotation is not orthogonal within 1e-12");
  if (!(std::abs(rotation.determinant() - 1.0) <= 1e-12)) {
    throw std::invalid_argument("rotation must be proper (det = +1)");
  }
  Graph3D out = g;
  out.positions = (g.positions * rotation.transpose()).rowwise() + translation.transpose();
  return out;
}

}  // namespace sphmp
