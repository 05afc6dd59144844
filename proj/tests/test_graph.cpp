/*
Copyright 2026 The wnll Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <numeric>

#include "oracles.hpp"
#include "wnll/graph.hpp"

using namespace wnll;

namespace {

LabeledSet arc_labels(std::size_t m, std::uint64_t seed) {
  const RegionSpec arc{ManifoldSpec::circle(), RegionKind::kArc, {0, 0}, kPi / 4};
  return sample_labeled(arc, m, seed, LabelFunction::sin_theta());
}

std::vector<std::uint32_t> brute_query(const PointList& pts, const Point& x, double r) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (squared_distance(pts[i], x) <= r * r) out.push_back(static_cast<std::uint32_t>(i));
  return out;
}

void check_against_brute_force(const AffinityGraph& g) {
  const auto& p = g.unlabeled_points();
  const auto& s = g.labeled_points();
  const auto r = oracle::brute_edges(p, p, g.profile().compile(KernelKind::kR));
  const auto k = oracle::brute_edges(p, s, g.profile().compile(KernelKind::kK));
  std::size_t r_total = 0, k_total = 0;
  bool r_same = true, k_same = true, d_k_same = true, d_r_close = true;
  for (std::size_t i = 0; i < p.size(); ++i) {
    r_same = r_same && g.r_edges(i) == r[i];
    const auto ke = g.k_edges(i);
    k_same = k_same && std::vector<Edge>(ke.begin(), ke.end()) == k[i];
    double dk = 0, dr = 0;
    for (const Edge& e : k[i]) dk += e.weight;
    for (const Edge& e : r[i]) dr += e.weight;
    d_k_same = d_k_same && g.d_k()[i] == dk;
    d_r_close = d_r_close && std::abs(g.d_r()[i] - dr) <= 1e-12 * dr;
    d_r_close = d_r_close && g.r_degree()[i] == r[i].size();
    r_total += r[i].size();
    k_total += k[i].size();
  }
  CHECK(r_same);
  CHECK(k_same);
  CHECK(d_k_same);
  CHECK(d_r_close);
  CHECK(g.r_edge_count() == r_total);
  CHECK(g.k_edge_count() == k_total);
}

}  // namespace

TEST_CASE("neighbor index queries") {
  SUBCASE("two points") {
    const PointList near{{0, 0, 0, 0}, {0.5, 0, 0, 0}};
    const NeighborIndex a(near, 1.0, 2);
    CHECK(a.query(near[0], 1.0) == std::vector<std::uint32_t>{0, 1});
    const PointList far{{0, 0, 0, 0}, {1.5, 0, 0, 0}};
    const NeighborIndex b(far, 1.0, 2);
    CHECK(b.query(far[0], 1.0) == std::vector<std::uint32_t>{0});
    CHECK(b.query(far[1], 1.0) == std::vector<std::uint32_t>{1});
  }
  SUBCASE("brute force on circle, sphere and torus clouds") {
    for (auto spec : {ManifoldSpec::circle(), ManifoldSpec::sphere(), ManifoldSpec::clifford_torus()}) {
      const auto cloud = sample_manifold(spec, 1000, 7, SamplingMode::kUniformRandom);
      for (double cell : {0.05, 0.2, 0.5}) {
        const NeighborIndex index(cloud.points, cell, spec.ambient_dim());
        bool same = true;
        for (std::size_t i = 0; i < cloud.size(); i += 7)
          same = same && index.query(cloud.points[i], 0.2) == brute_query(cloud.points, cloud.points[i], 0.2);
        CHECK(same);
      }
    }
  }
  SUBCASE("sorted layout") {
    const auto cloud = sample_manifold(ManifoldSpec::sphere(), 500, 1, SamplingMode::kUniformRandom);
    const NeighborIndex index(cloud.points, 0.3, 3);
    std::vector<int> seen(500, 0);
    for (std::size_t pos = 0; pos < index.size(); ++pos) {
      const auto i = index.order()[pos];
      ++seen[i];
      CHECK(index.rank()[i] == pos);
      CHECK(index.sorted_coords(2)[pos] == cloud.points[i][2]);
      const auto [b, e] = index.cell_range(index.cell_of_sorted(static_cast<std::uint32_t>(pos)));
      CHECK((b <= pos && pos < e));
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  }
  SUBCASE("cell blocks cover the radius") {
    const auto cloud = sample_manifold(ManifoldSpec::circle(), 800, 3, SamplingMode::kUniformRandom);
    const NeighborIndex index(cloud.points, 0.05, 2);
    const auto blocks = index.cell_blocks(0.2);
    bool ok = true;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Point& x = cloud.points[i];
      std::vector<std::uint32_t> found;
      index.for_each_block_range(x, index.cell_of_sorted(index.rank()[i]), blocks, [&](std::uint32_t b, std::uint32_t e) {
        for (auto pos = b; pos < e; ++pos)
          if (squared_distance(x, cloud.points[index.order()[pos]]) <= 0.04) found.push_back(index.order()[pos]);
      });
      std::sort(found.begin(), found.end());
      ok = ok && found == brute_query(cloud.points, x, 0.2);
    }
    CHECK(ok);
  }
  CHECK_THROWS_AS(NeighborIndex(PointList{}, 1.0, 2), InvalidArgument);
  CHECK_THROWS_AS(NeighborIndex(PointList{{0, 0, 0, 0}}, 0.0, 2), InvalidArgument);
}

TEST_CASE("assembly equals the brute-force scan") {
  const auto profile1 = make_profile("wendland_c2_default", 0.2, 1);
  const auto circle = sample_manifold(ManifoldSpec::circle(), 200, 1, SamplingMode::kUniformRandom);
  check_against_brute_force(AffinityGraph::assemble(circle, arc_labels(10, 2), profile1));

  const RegionSpec cap{ManifoldSpec::sphere(), RegionKind::kCap, {0.3, 1.0}, 0.6};
  const auto sphere = sample_manifold(ManifoldSpec::sphere(), 500, 4, SamplingMode::kUniformRandom);
  const auto labels = sample_labeled(cap, 30, 5, LabelFunction::coordinate(0));
  check_against_brute_force(AffinityGraph::assemble(sphere, labels, make_profile("wendland_c2_default", 0.15, 2)));

  const RegionSpec band{ManifoldSpec::clifford_torus(), RegionKind::kBand, {0, 0}, 0.3};
  const auto torus = sample_manifold(band.manifold, 500, 6, SamplingMode::kQuasiUniform);
  const auto tl = sample_labeled(band, 20, 7, LabelFunction::sin_theta());
  check_against_brute_force(AffinityGraph::assemble(torus, tl, make_profile("wendland_c2_default", 0.2, 2)));
}

TEST_CASE("R edges are symmetric with identical weights") {
  const auto cloud = sample_manifold(ManifoldSpec::circle(), 300, 9, SamplingMode::kUniformRandom);
  const auto g = AffinityGraph::assemble(cloud, arc_labels(5, 1), make_profile("wendland_c2_default", 0.15, 1));
  bool ok = true;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    for (const Edge& e : g.r_edges(i)) {
      const auto back = g.r_edges(e.index);
      const auto it = std::find_if(back.begin(), back.end(), [&](const Edge& f) { return f.index == i; });
      ok = ok && it != back.end() && it->weight == e.weight;
    }
  CHECK(ok);
}

TEST_CASE("small configurations") {
  SUBCASE("one unlabeled, one labeled") {
    const auto prof = make_profile("wendland_c2_default", 0.2, 1);
    const PointList p{{1, 0, 0, 0}}, s{{std::cos(0.1), std::sin(0.1), 0, 0}};
    const auto g = AffinityGraph::assemble(p, s, prof, 2);
    CHECK(g.k_edge_count() == 1);
    CHECK(g.d_k()[0] == prof.eval_scaled(KernelKind::kK, p[0], s[0]));
    CHECK(g.d_k()[0] > 0);
    CHECK(g.d_r()[0] == prof.normalization());
    CHECK(g.r_offdiag_sums()[0] == 0.0);
    CHECK(check_s_connected(g).s_connected);
  }
  SUBCASE("isolated points") {
    const auto prof = make_profile("wendland_c2_default", 0.01, 1);
    const auto cloud = sample_manifold(ManifoldSpec::circle(), 50, 0, SamplingMode::kQuasiUniform);
    const PointList s{ManifoldSpec::circle().embed({0.06, 0})};
    const auto g = AffinityGraph::assemble(cloud.points, s, prof, 2);
    CHECK(g.r_edge_count() == 50);
    CHECK(g.k_edge_count() == 0);
    for (std::size_t i = 0; i < 50; ++i) {
      CHECK(g.d_k()[i] == 0.0);
      CHECK(g.r_edges(i) == std::vector<Edge>{{static_cast<std::uint32_t>(i), prof.normalization()}});
    }
    const auto rep = check_s_connected(g);
    CHECK(!rep.s_connected);
    CHECK(rep.unreachable.size() == 50);
  }
  SUBCASE("empty P") {
    const auto g = AffinityGraph::assemble(PointList{}, PointList{{1, 0, 0, 0}}, make_profile("wendland_c2_default", 0.1, 1), 2);
    CHECK(g.unlabeled_count() == 0);
    CHECK(check_s_connected(g).s_connected);
  }
}

TEST_CASE("assembly errors") {
  const auto cloud = sample_manifold(ManifoldSpec::circle(), 20, 0, SamplingMode::kQuasiUniform);
  CHECK_THROWS_AS(AffinityGraph::assemble(cloud.points, PointList{}, make_profile("wendland_c2_default", 0.1, 1), 2),
                  InvalidArgument);
  for (const char* id : {"gaussian_nonconforming", "linear_hat_r", "short_support_k", "negative_lobe_r"})
    CHECK_THROWS_AS(AffinityGraph::assemble(cloud, arc_labels(3, 0), make_profile(id, 0.1, 1)), InvalidArgument);
  CHECK_THROWS_AS(AffinityGraph::assemble(cloud, arc_labels(3, 0), make_profile("wendland_c2_default", 1.5, 1)),
                  InvalidArgument);
  CHECK_THROWS_AS(AffinityGraph::assemble(cloud, arc_labels(3, 0), make_profile("wendland_c2_default", 0.1, 2)),
                  InvalidArgument);
}

TEST_CASE("graph does not depend on the worker count") {
  const auto cloud = sample_manifold(ManifoldSpec::sphere(), 3000, 2, SamplingMode::kUniformRandom);
  const RegionSpec cap{ManifoldSpec::sphere(), RegionKind::kCap, {0, 0}, 0.5};
  const auto labels = sample_labeled(cap, 40, 3, LabelFunction::coordinate(2));
  const auto prof = make_profile("wendland_c2_default", 0.1, 2);
  setenv("WNLL_THREADS", "1", 1);
  const auto a = AffinityGraph::assemble(cloud, labels, prof);
  setenv("WNLL_THREADS", "4", 1);
  const auto b = AffinityGraph::assemble(cloud, labels, prof);
  unsetenv("WNLL_THREADS");
  CHECK(std::equal(a.d_k().begin(), a.d_k().end(), b.d_k().begin()));
  CHECK(a.r_edge_count() == b.r_edge_count());
  CHECK(a.k_edge_count() == b.k_edge_count());
  double worst = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    worst = std::max(worst, std::abs(a.d_r()[i] - b.d_r()[i]) / a.d_r()[i]);
    CHECK(a.r_edges(i) == b.r_edges(i));
  }
  CHECK(worst <= 1e-13);
}

TEST_CASE("degree matches the population mean") {
  // Interior quasi-uniform circle points: d_R / n against (1/|M|) int R_delta dy.
  const double delta = 0.1;
  const auto prof = make_profile("wendland_c2_default", delta, 1);
  const auto cloud = sample_manifold(ManifoldSpec::circle(), 5000, 0, SamplingMode::kQuasiUniform);
  const auto g = AffinityGraph::assemble(cloud, arc_labels(5, 0), prof);
  const std::size_t nq = 200000;
  double mass = 0;
  for (std::size_t i = 0; i < nq; ++i) {
    const double t = kTwoPi * static_cast<double>(i) / nq;
    mass += prof.eval_squared(KernelKind::kR, 4 * std::sin(t / 2) * std::sin(t / 2));
  }
  mass /= nq;
  for (std::size_t i = 0; i < 5000; i += 250) CHECK(g.d_r()[i] / 5000 == doctest::Approx(mass).epsilon(0.05));
}

TEST_CASE("connectivity") {
  SUBCASE("dense circle cloud") {
    const auto prof = make_profile("wendland_c2_default", 0.2, 1);
    const auto cloud = sample_manifold(ManifoldSpec::circle(), 1000, 3, SamplingMode::kUniformRandom);
    const auto labels = arc_labels(10, 4);
    const auto rep = check_s_connected(AffinityGraph::assemble(cloud, labels, prof));
    const auto reach = oracle::brute_reachable(cloud.points, labels.points, prof);
    CHECK(rep.s_connected == std::all_of(reach.begin(), reach.end(), [](bool b) { return b; }));
    CHECK(rep.s_connected);
    CHECK(rep.max_hops > 1);
    for (std::size_t i = 0; i < cloud.size(); ++i) CHECK(rep.hops[i] >= 1);
  }
  SUBCASE("two antipodal clusters") {
    const auto prof = make_profile("wendland_c2_default", 0.1, 1);
    const auto& c = ManifoldSpec::circle();
    PointList p;
    for (int i = 0; i < 20; ++i) p.push_back(c.embed({-0.05 + 0.005 * i, 0}));
    for (int i = 0; i < 15; ++i) p.push_back(c.embed({kPi - 0.05 + 0.007 * i, 0}));
    const PointList s{c.embed({0.01, 0}), c.embed({-0.02, 0})};
    const auto rep = check_s_connected(AffinityGraph::assemble(p, s, prof, 2));
    CHECK(!rep.s_connected);
    std::vector<std::uint32_t> want(15);
    std::iota(want.begin(), want.end(), 20u);
    CHECK(rep.unreachable == want);
    CHECK(rep.hops[25] == -1);
  }
  SUBCASE("growing delta never disconnects") {
    const auto cloud = sample_manifold(ManifoldSpec::sphere(), 800, 8, SamplingMode::kUniformRandom);
    const RegionSpec cap{ManifoldSpec::sphere(), RegionKind::kCap, {0, 0}, 0.4};
    const auto labels = sample_labeled(cap, 10, 9, LabelFunction::coordinate(2));
    bool was = false;
    for (double d : {0.03, 0.05, 0.08, 0.12, 0.2}) {
      const auto prof = make_profile("wendland_c2_default", d, 2);
      const auto rep = check_s_connected(AffinityGraph::assemble(cloud, labels, prof));
      const auto reach = oracle::brute_reachable(cloud.points, labels.points, prof);
      std::vector<std::uint32_t> un;
      for (std::size_t i = 0; i < reach.size(); ++i)
        if (!reach[i]) un.push_back(static_cast<std::uint32_t>(i));
      CHECK(rep.unreachable == un);
      CHECK((!was || rep.s_connected));
      was = rep.s_connected;
    }
    CHECK(was);
  }
}

TEST_CASE("graph stats") {
  const auto cloud = sample_manifold(ManifoldSpec::circle(), 400, 1, SamplingMode::kQuasiUniform);
  const auto g = AffinityGraph::assemble(cloud, arc_labels(8, 1), make_profile("wendland_c2_default", 0.1, 1));
  const auto st = g.stats(5);
  CHECK(st.unlabeled == 400);
  CHECK(st.labeled == 8);
  CHECK(st.r_edges == g.r_edge_count());
  CHECK(st.degree_histogram.size() == 5);
  CHECK(std::accumulate(st.degree_histogram.begin(), st.degree_histogram.end(), std::size_t{0}) == 400);
  CHECK(st.d_r_min <= st.d_r_mean * (1 + 1e-12));
  CHECK(st.d_r_mean <= st.d_r_max * (1 + 1e-12));
  CHECK(st.d_k_min == 0.0);
}
