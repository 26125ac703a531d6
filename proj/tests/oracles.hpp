// SPDX-License-Identifier: Apache-2.0
// Independent reference computations used only by the tests.
#pragma once

#include "sphmp/geometry.hpp"
#include "sphmp/ingest.hpp"
#include "sphmp/rng.hpp"
#include "sphmp/synthetic.hpp"

#include <boost/math/special_functions/spherical_harmonic.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace oracle {

using Big = boost::multiprecision::cpp_bin_float_100;

/// j_l(x) from its power series, summed in 100-digit arithmetic.
inline double spherical_bessel(int l, double x_in) {
  const Big x(x_in);
  Big prefactor = 1;
  for (int k = 1; k <= l; ++k) prefactor *= x / (2 * k + 1);
  const Big y = -x * x / 2;
  Big term = 1;
  Big sum = 1;
  for (int k = 1; k < 2000; ++k) {
    term *= y / (k * (2 * l + 2 * k + 1));
    sum += term;
    if (k > x_in && abs(term) < Big("1e-60") * abs(sum)) break;
  }
  return static_cast<double>(prefactor * sum);
}

/// Root of j_l in [lo, hi] by bisection on the high-precision series.
inline double bessel_root(int l, double lo, double hi) {
  double f_lo = spherical_bessel(l, lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f = spherical_bessel(l, mid);
    if ((f > 0) == (f_lo > 0)) {
      lo = mid;
      f_lo = f;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Real harmonic without the Condon-Shortley phase, from Boost's complex form.
inline double real_sph_harm(int l, int m, double theta, double phi) {
  const int am = std::abs(m);
  const double sign = (am % 2 == 0) ? 1.0 : -1.0;
  if (m == 0) return boost::math::spherical_harmonic_r<double>(static_cast<unsigned>(l), 0, theta, phi);
  if (m > 0) return std::sqrt(2.0) * sign * boost::math::spherical_harmonic_r<double>(static_cast<unsigned>(l), am, theta, phi);
  return std::sqrt(2.0) * sign * boost::math::spherical_harmonic_i<double>(static_cast<unsigned>(l), am, theta, phi);
}

/// n-point Gauss-Legendre rule on [a, b].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline Quadrature gauss_legendre(int n, double a, double b) {
  Quadrature q;
  for (int i = 1; i <= n; ++i) {
    double x = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    q.nodes.push_back(0.5 * (b - a) * x + 0.5 * (b + a));
    q.weights.push_back((b - a) / ((1.0 - x * x) * dp * dp));
  }
  return q;
}

/// Every (edge k, edge j) path found by scanning all ordered atom triples.
inline std::vector<std::pair<std::size_t, std::size_t>> brute_force_pairs(const sphmp::Graph3D& g, double cutoff,
                                                                           const sphmp::DirectedEdgeList& edges) {
  const int n = static_cast<int>(g.size());
  auto within = [&](int a, int b) { return a != b && (g.positions.row(a) - g.positions.row(b)).norm() <= cutoff; };
  auto edge_of = [&](int s, int r) {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (edges.senders[e] == s && edges.receivers[e] == r) return e;
    }
    return static_cast<std::size_t>(-1);
  };
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (int s = 0; s < n; ++s) {
    for (int r = 0; r < n; ++r) {
      for (int q = 0; q < n; ++q) {
        if (q == r || !within(s, r) || !within(q, s)) continue;
        out.emplace_back(edge_of(s, r), edge_of(q, s));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// n atoms uniform in a cube of the given side, at least min_sep apart.
inline sphmp::Graph3D random_graph(sphmp::CounterRng& rng, int n, double side, double min_sep = 0.3,
                                   std::string id = "g") {
  Eigen::MatrixX3d x(n, 3);
  std::vector<int> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    bool ok = false;
    while (!ok) {
      for (int a = 0; a < 3; ++a) x(i, a) = rng.uniform(0.0, side);
      ok = true;
      for (int j = 0; j < i; ++j) ok = ok && (x.row(i) - x.row(j)).norm() >= min_sep;
    }
    static constexpr int kElements[] = {1, 6, 7, 8, 9};
    z[static_cast<std::size_t>(i)] = kElements[rng.below(5)];
  }
  return sphmp::make_graph(std::move(id), z, x, rng.uniform(-1.0, 1.0));
}

inline sphmp::Graph3D random_motion(const sphmp::Graph3D& g, sphmp::CounterRng& rng) {
  const Eigen::Matrix3d rot = sphmp::random_rotation(rng);
  const Eigen::Vector3d t(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10));
  return sphmp::rigid_transform(g, rot, t);
}

inline sphmp::Graph3D permute(const sphmp::Graph3D& g, const std::vector<int>& perm) {
  sphmp::Graph3D out = g;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    out.atomic_numbers[i] = g.atomic_numbers[static_cast<std::size_t>(perm[i])];
    out.positions.row(static_cast<Eigen::Index>(i)) = g.positions.row(perm[i]);
  }
  return out;
}

/// Per edge (as sender/receiver atoms), the sorted multiset of (d_j, θ, φ) tuples.
using EdgeKey = std::pair<int, int>;
using Tuple = std::tuple<double, double, double>;

inline std::vector<std::pair<EdgeKey, std::vector<Tuple>>> geometry_by_edge(
    const sphmp::DirectedEdgeList& edges, const sphmp::TwoHopGeometry& geo, const std::vector<int>& atom_label) {
  std::vector<std::pair<EdgeKey, std::vector<Tuple>>> out;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    std::vector<Tuple> tuples;
    for (std::size_t p = geo.pairs.offsets[k]; p < geo.pairs.offsets[k + 1]; ++p) {
      tuples.emplace_back(edges.distances[geo.pairs.edge_j[p]], geo.theta[p], geo.phi[p]);
    }
    std::sort(tuples.begin(), tuples.end());
    out.push_back({{atom_label[static_cast<std::size_t>(edges.senders[k])],
                    atom_label[static_cast<std::size_t>(edges.receivers[k])]},
                   std::move(tuples)});
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oracle
