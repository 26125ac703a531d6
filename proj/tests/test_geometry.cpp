// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"
#include "sphmp/error.hpp"
#include "sphmp/geometry.hpp"

#include <doctest.h>

#include <numbers>
#include <numeric>

using namespace sphmp;
constexpr double kPi = std::numbers::pi;

namespace {

Graph3D graph_of(std::vector<int> z, std::initializer_list<std::array<double, 3>> pts) {
  Eigen::MatrixX3d x(static_cast<Eigen::Index>(pts.size()), 3);
  Eigen::Index i = 0;
  for (const auto& p : pts) {
    x.row(i++) << p[0], p[1], p[2];
  }
  return make_graph("t", std::move(z), x);
}

std::size_t edge_index(const DirectedEdgeList& e, int s, int r) {
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (e.senders[k] == s && e.receivers[k] == r) return k;
  }
  FAIL("edge not found");
  return 0;
}

}  // namespace

TEST_SUITE("radius graph") {
  TEST_CASE("two atoms inside the cutoff") {
    const auto e = build_radius_graph(graph_of({1, 1}, {{0, 0, 0}, {1, 0, 0}}), 5.0);
    REQUIRE(e.size() == 2);
    CHECK(e.distances[0] == 1.0);
    CHECK(e.distances[1] == 1.0);
  }
  TEST_CASE("two atoms beyond the cutoff") {
    CHECK(build_radius_graph(graph_of({1, 1}, {{0, 0, 0}, {6, 0, 0}}), 5.0).size() == 0);
  }
  TEST_CASE("equilateral triangle") {
    const double h = std::sqrt(3.0) / 2.0;
    const auto e = build_radius_graph(graph_of({1, 1, 1}, {{0, 0, 0}, {1, 0, 0}, {0.5, h, 0}}), 5.0);
    REQUIRE(e.size() == 6);
    for (double d : e.distances) CHECK(d == doctest::Approx(1.0).epsilon(1e-15));
  }
  TEST_CASE("cutoff is inclusive and edges sorted by receiver") {
    const auto e = build_radius_graph(graph_of({1, 1, 1}, {{0, 0, 0}, {2, 0, 0}, {4, 0, 0}}), 2.0);
    REQUIRE(e.size() == 4);
    for (std::size_t k = 1; k < e.size(); ++k) {
      CHECK(std::make_pair(e.receivers[k - 1], e.senders[k - 1]) < std::make_pair(e.receivers[k], e.senders[k]));
    }
    for (int i = 0; i < 3; ++i) {
      for (auto k = e.incoming_offsets[static_cast<std::size_t>(i)]; k < e.incoming_offsets[static_cast<std::size_t>(i) + 1]; ++k) {
        CHECK(e.receivers[k] == i);
      }
    }
  }
  TEST_CASE("non-positive cutoff rejected") {
    CHECK_THROWS(build_radius_graph(graph_of({1}, {{0, 0, 0}}), 0.0));
  }
}

TEST_SUITE("two-hop index") {
  TEST_CASE("chain excludes the reverse edge") {
    const auto g = graph_of({1, 1, 1}, {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}});
    const auto e = build_radius_graph(g, 1.5);
    REQUIRE(e.size() == 4);
    const auto p = build_two_hop_index(e);
    const auto k = edge_index(e, 1, 0);
    REQUIRE(p.offsets[k + 1] - p.offsets[k] == 1);
    CHECK(p.edge_j[p.offsets[k]] == edge_index(e, 2, 1));
  }
  TEST_CASE("single bond has no pairs") {
    const auto e = build_radius_graph(graph_of({1, 1}, {{0, 0, 0}, {1, 0, 0}}), 5.0);
    CHECK(build_two_hop_index(e).size() == 0);
  }
  TEST_CASE("star with three leaves") {
    const auto g = graph_of({6, 1, 1, 1}, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    const auto e = build_radius_graph(g, 1.2);  // leaves are sqrt(2) apart
    REQUIRE(e.size() == 6);
    const auto p = build_two_hop_index(e);
    std::size_t from_center = 0;
    for (int leaf = 1; leaf <= 3; ++leaf) {
      const auto k = edge_index(e, 0, leaf);
      CHECK(p.offsets[k + 1] - p.offsets[k] == 2);
      from_center += p.offsets[k + 1] - p.offsets[k];
    }
    CHECK(from_center == 6);
    std::vector<std::pair<std::size_t, std::size_t>> got;
    for (std::size_t i = 0; i < p.size(); ++i) got.emplace_back(p.edge_k[i], p.edge_j[i]);
    CHECK(got == oracle::brute_force_pairs(g, 1.2, e));
  }
  TEST_CASE("matches exhaustive enumeration on small random graphs") {
    CounterRng rng(11, "two-hop");
    for (int trial = 0; trial < 300; ++trial) {
      const int n = 1 + static_cast<int>(rng.below(6));
      const auto g = oracle::random_graph(rng, n, 3.0);
      const double cutoff = rng.uniform(0.5, 4.0);
      const auto e = build_radius_graph(g, cutoff);
      const auto p = build_two_hop_index(e);
      std::vector<std::pair<std::size_t, std::size_t>> got;
      for (std::size_t i = 0; i < p.size(); ++i) got.emplace_back(p.edge_k[i], p.edge_j[i]);
      CHECK(got == oracle::brute_force_pairs(g, cutoff, e));
    }
  }
}

TEST_SUITE("angles") {
  TEST_CASE("right angle at the origin") {
    const auto g = graph_of({1, 1, 1}, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}});
    const auto e = build_radius_graph(g, 1.2);
    const auto geo = compute_two_hop_geometry(g, e);
    const auto k = edge_index(e, 0, 1);
    REQUIRE(geo.pairs.offsets[k + 1] - geo.pairs.offsets[k] == 1);
    CHECK(geo.theta[geo.pairs.offsets[k]] == doctest::Approx(kPi / 2).epsilon(1e-15));
  }
  TEST_CASE("collinear chain gives pi") {
    const auto g = graph_of({1, 1, 1}, {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}});
    const auto e = build_radius_graph(g, 1.5);
    const auto geo = compute_two_hop_geometry(g, e);
    for (double t : geo.theta) CHECK(t == doctest::Approx(kPi).epsilon(1e-15));
  }
  TEST_CASE("equilateral triangle gives pi/3") {
    const double h = std::sqrt(3.0) / 2.0;
    const auto g = graph_of({1, 1, 1}, {{0, 0, 0}, {1, 0, 0}, {0.5, h, 0}});
    const auto geo = compute_two_hop_geometry(g, build_radius_graph(g, 5.0));
    REQUIRE(geo.theta.size() == 6);
    for (double t : geo.theta) CHECK(t == doctest::Approx(kPi / 3).epsilon(1e-14));
  }
  TEST_CASE("nearly parallel vectors stay finite and in range") {
    const auto g = graph_of({1, 1, 1}, {{0, 0, 0}, {1, 0, 0}, {2, 1e-15, 0}});
    const auto geo = compute_two_hop_geometry(g, build_radius_graph(g, 5.0));
    for (double t : geo.theta) {
      CHECK(std::isfinite(t));
      CHECK(t >= 0.0);
      CHECK(t <= kPi);
    }
  }
}

TEST_SUITE("torsions") {
  TEST_CASE("quarter turn gives pi/2 and 3pi/2") {
    for (double zeta : {-0.7, 0.0, 0.4, 2.0}) {
      const auto g = graph_of({1, 1, 1, 1}, {{0, 0, 0}, {0, 0, 1}, {1, 0, zeta}, {0, 1, zeta}});
      const auto e = build_radius_graph(g, 10.0);
      const auto geo = compute_two_hop_geometry(g, e);
      const auto k = edge_index(e, 0, 1);
      std::vector<double> phis;
      for (auto p = geo.pairs.offsets[k]; p < geo.pairs.offsets[k + 1]; ++p) phis.push_back(geo.phi[p]);
      std::sort(phis.begin(), phis.end());
      REQUIRE(phis.size() == 2);
      CHECK(phis[0] == doctest::Approx(kPi / 2).epsilon(1e-13));
      CHECK(phis[1] == doctest::Approx(3 * kPi / 2).epsilon(1e-13));
    }
  }

  TEST_CASE("anticlockwise about the edge axis") {
    // Looking down the s_k -> r_k axis (+z), the neighbor on +x comes before the one on +y.
    const auto g = graph_of({1, 1, 1, 1}, {{0, 0, 0}, {0, 0, 1}, {1, 0, 0}, {0, 1, 0}});
    const auto e = build_radius_graph(g, 10.0);
    const auto geo = compute_two_hop_geometry(g, e);
    const auto k = edge_index(e, 0, 1);
    for (auto p = geo.pairs.offsets[k]; p < geo.pairs.offsets[k + 1]; ++p) {
      const int q = e.senders[geo.pairs.edge_j[p]];
      CHECK(geo.phi[p] == doctest::Approx(q == 3 ? kPi / 2 : 3 * kPi / 2).epsilon(1e-13));
    }
  }

  TEST_CASE("three neighbors close the circle") {
    const auto g = graph_of({6, 1, 1, 1, 1}, {{0, 0, 0}, {0, 0, 1}, {1, 0.2, -0.3}, {-0.4, 0.9, 0.1}, {-0.3, -1, 0.5}});
    const auto e = build_radius_graph(g, 10.0);
    const auto geo = compute_two_hop_geometry(g, e);
    const auto k = edge_index(e, 0, 1);
    CHECK(geo.neighbor_count[k] == 3);
    double sum = 0.0;
    for (auto p = geo.pairs.offsets[k]; p < geo.pairs.offsets[k + 1]; ++p) sum += geo.phi[p];
    CHECK(std::abs(sum - 2 * kPi) < 1e-12);
  }

  TEST_CASE("single neighbor gives zero") {
    const auto g = graph_of({1, 1, 1}, {{0, 0, 0}, {1, 0, 0}, {0.3, 1, 0.2}});
    const auto e = build_radius_graph(g, 10.0);
    const auto geo = compute_two_hop_geometry(g, e);
    for (std::size_t k = 0; k < e.size(); ++k) {
      CHECK(geo.neighbor_count[k] == 1);
    }
    for (double phi : geo.phi) CHECK(phi == 0.0);
  }

  TEST_CASE("collinear neighbor is flagged and gets zero") {
    const auto g = graph_of({1, 1, 1, 1}, {{0, 0, 0}, {0, 0, 1}, {0, 0, -1}, {1, 0, 0.5}});
    const auto e = build_radius_graph(g, 10.0);
    const auto geo = compute_two_hop_geometry(g, e);
    const auto k = edge_index(e, 0, 1);
    bool flagged = false;
    for (auto p = geo.pairs.offsets[k]; p < geo.pairs.offsets[k + 1]; ++p) {
      if (e.senders[geo.pairs.edge_j[p]] == 2) {
        CHECK(geo.phi[p] == 0.0);
        flagged = std::find(geo.collinear.begin(), geo.collinear.end(), p) != geo.collinear.end();
      }
    }
    CHECK(flagged);
  }

  TEST_CASE("closure and range on random graphs") {
    CounterRng rng(5, "closure");
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const auto g = oracle::random_graph(rng, 3 + static_cast<int>(rng.below(8)), 3.0);
      const auto e = build_radius_graph(g, 2.5);
      const auto geo = compute_two_hop_geometry(g, e);
      for (double phi : geo.phi) {
        CHECK(phi >= 0.0);
        CHECK(phi <= 2 * kPi);
      }
      for (std::size_t k = 0; k < e.size(); ++k) {
        if (geo.neighbor_count[k] < 2) continue;
        double sum = 0.0;
        for (auto p = geo.pairs.offsets[k]; p < geo.pairs.offsets[k + 1]; ++p) sum += geo.phi[p];
        CHECK(std::abs(sum - 2 * kPi) < 1e-9);
        ++checked;
      }
    }
    CHECK(checked > 100);
  }

  TEST_CASE("hydrogen peroxide dihedral") {
    // H-O-O-H with a 111.5 degree dihedral; all atoms within the cutoff.
    const double psi = 111.5 * kPi / 180.0;
    const double t = 100.0 * kPi / 180.0;
    const auto g = graph_of({1, 8, 8, 1}, {{0.97 * std::cos(t), 0.97 * std::sin(t), 0.0},
                                           {0, 0, 0},
                                           {1.45, 0, 0},
                                           {1.45 - 0.97 * std::cos(t), 0.97 * std::sin(t) * std::cos(psi),
                                            0.97 * std::sin(t) * std::sin(psi)}});
    const auto e = build_radius_graph(g, 5.0);
    const auto geo = compute_two_hop_geometry(g, e);
    const auto k = edge_index(e, 1, 2);
    std::vector<double> phis;
    for (auto p = geo.pairs.offsets[k]; p < geo.pairs.offsets[k + 1]; ++p) phis.push_back(geo.phi[p]);
    std::sort(phis.begin(), phis.end());
    REQUIRE(phis.size() == 2);
    CHECK(phis[0] == doctest::Approx(psi).epsilon(1e-12));
    CHECK(phis[1] == doctest::Approx(2 * kPi - psi).epsilon(1e-12));
  }
}

TEST_SUITE("invariance") {
  TEST_CASE("rigid motions preserve every (d, theta, phi) tuple") {
    CounterRng rng(9, "se3");
    for (int trial = 0; trial < 20; ++trial) {
      const auto g = oracle::random_graph(rng, 6, 2.5);
      const auto e = build_radius_graph(g, 3.0);
      const auto geo = compute_two_hop_geometry(g, e);
      for (int m = 0; m < 5; ++m) {
        const auto moved = oracle::random_motion(g, rng);
        const auto e2 = build_radius_graph(moved, 3.0);
        REQUIRE(e2.senders == e.senders);
        REQUIRE(e2.receivers == e.receivers);
        const auto geo2 = compute_two_hop_geometry(moved, e2);
        REQUIRE(geo2.pairs.edge_j == geo.pairs.edge_j);
        for (std::size_t p = 0; p < geo.theta.size(); ++p) {
          CHECK(std::abs(geo2.theta[p] - geo.theta[p]) < 1e-9);
          CHECK(std::abs(geo2.phi[p] - geo.phi[p]) < 1e-9);
        }
        for (std::size_t k = 0; k < e.size(); ++k) CHECK(std::abs(e2.distances[k] - e.distances[k]) < 1e-9);
      }
    }
  }

  TEST_CASE("relabeling atoms permutes pairs only") {
    CounterRng rng(21, "perm");
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 7;
      const auto g = oracle::random_graph(rng, n, 2.5);
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      for (int i = n - 1; i > 0; --i) std::swap(perm[static_cast<std::size_t>(i)], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
      const auto pg = oracle::permute(g, perm);
      std::vector<int> identity(n);
      std::iota(identity.begin(), identity.end(), 0);
      const auto e1 = build_radius_graph(g, 3.0);
      const auto e2 = build_radius_graph(pg, 3.0);
      auto a = oracle::geometry_by_edge(e1, compute_two_hop_geometry(g, e1), identity);
      auto b = oracle::geometry_by_edge(e2, compute_two_hop_geometry(pg, e2), perm);
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].first == b[i].first);
        REQUIRE(a[i].second.size() == b[i].second.size());
        for (std::size_t t = 0; t < a[i].second.size(); ++t) {
          CHECK(std::abs(std::get<0>(a[i].second[t]) - std::get<0>(b[i].second[t])) < 1e-12);
          CHECK(std::abs(std::get<1>(a[i].second[t]) - std::get<1>(b[i].second[t])) < 1e-12);
          CHECK(std::abs(std::get<2>(a[i].second[t]) - std::get<2>(b[i].second[t])) < 1e-12);
        }
      }
    }
  }

  TEST_CASE("rigid_transform") {
    const auto g = graph_of({1, 6}, {{0, 0, 0}, {1, 2, 3}});
    const auto same = rigid_transform(g, Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero());
    CHECK(same.positions == g.positions);
    const auto shifted = rigid_transform(g, Eigen::Matrix3d::Identity(), Eigen::Vector3d(4, -2, 7));
    CHECK((shifted.positions.row(1) - shifted.positions.row(0)).norm() ==
          doctest::Approx((g.positions.row(1) - g.positions.row(0)).norm()).epsilon(1e-15));
    Eigen::Matrix3d reflect = Eigen::Matrix3d::Identity();
    reflect(2, 2) = -1;
    CHECK_THROWS(rigid_transform(g, reflect, Eigen::Vector3d::Zero()));
    Eigen::Matrix3d skew = Eigen::Matrix3d::Identity();
    skew(0, 1) = 1e-6;
    CHECK_THROWS(rigid_transform(g, skew, Eigen::Vector3d::Zero()));
  }
}
