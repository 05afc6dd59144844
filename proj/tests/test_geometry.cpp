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

#include <cmath>
#include <numbers>

#include "wnll/geometry.hpp"

using namespace wnll;

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

RegionSpec quarter_arc() { return {ManifoldSpec::circle(), RegionKind::kArc, {0.0, 0.0}, kPi / 4}; }

// Laplace-Beltrami by central differences in the chart, h = 1e-4.
double fd_laplacian(const ManifoldSpec& spec, const LabelFunction& fn, Intrinsic t) {
  const double h = 1e-4;
  auto f = [&](double a, double b) { return fn.value(spec, spec.embed({a, b})); };
  const double c = f(t[0], t[1]);
  const double r = spec.scale;
  switch (spec.kind) {
    case ManifoldKind::kCircle:
      return (f(t[0] + h, 0) - 2 * c + f(t[0] - h, 0)) / (h * h * r * r);
    case ManifoldKind::kSphere: {
      const double psi = t[0];
      const double up = std::sin(psi + h / 2) * (f(psi + h, t[1]) - c) / h;
      const double dn = std::sin(psi - h / 2) * (c - f(psi - h, t[1])) / h;
      const double lon = (f(psi, t[1] + h) - 2 * c + f(psi, t[1] - h)) / (h * h);
      return ((up - dn) / h / std::sin(psi) + lon / (std::sin(psi) * std::sin(psi))) / (r * r);
    }
    case ManifoldKind::kCliffordTorus: {
      const double a2 = r * r / 2;
      return (f(t[0] + h, t[1]) + f(t[0] - h, t[1]) + f(t[0], t[1] + h) + f(t[0], t[1] - h) - 4 * c) / (h * h * a2);
    }
  }
  return 0;
}

}  // namespace

TEST_CASE("manifold constants") {
  CHECK(ManifoldSpec::circle(2).volume() == doctest::Approx(4 * kPi));
  CHECK(ManifoldSpec::sphere(2).volume() == doctest::Approx(16 * kPi));
  // Torus with factor radius a = s/sqrt(2): (2 pi a)^2.
  CHECK(ManifoldSpec::clifford_torus(2).volume() == doctest::Approx(8 * kPi * kPi));
  CHECK(ManifoldSpec::clifford_torus(2).torus_radius() == doctest::Approx(kSqrt2));
  CHECK(ManifoldSpec::sphere().intrinsic_dim() == 2);
  CHECK(ManifoldSpec::clifford_torus().ambient_dim() == 4);
  CHECK_THROWS_AS(ManifoldSpec::circle(-1).validate(), InvalidArgument);
  CHECK(parse_manifold_kind(to_string(ManifoldKind::kCliffordTorus)) == ManifoldKind::kCliffordTorus);
  CHECK_THROWS_AS(parse_manifold_kind("klein_bottle"), InvalidArgument);
}

TEST_CASE("geodesic distances match great-circle and flat-torus formulas") {
  const auto circle = ManifoldSpec::circle(1.5);
  CHECK(circle.geodesic_distance(circle.embed({0.1, 0}), circle.embed({-3.1, 0})) ==
        doctest::Approx(1.5 * (2 * kPi - 3.2)));
  const auto sphere = ManifoldSpec::sphere();
  CHECK(sphere.geodesic_distance(sphere.embed({0.3, 0.0}), sphere.embed({0.3, kPi})) == doctest::Approx(0.6));
  const auto torus = ManifoldSpec::clifford_torus();
  const double a = torus.torus_radius();
  CHECK(torus.geodesic_distance(torus.embed({0.2, 1.0}), torus.embed({-0.1, 0.6})) ==
        doctest::Approx(a * std::hypot(0.3, 0.4)));
}

TEST_CASE("sample_manifold") {
  SUBCASE("circle quasi-uniform n=4") {
    const auto cloud = sample_manifold(ManifoldSpec::circle(), 4, 0, SamplingMode::kQuasiUniform);
    const Point expect[4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {-1, 0, 0, 0}, {0, -1, 0, 0}};
    for (int i = 0; i < 4; ++i) CHECK(squared_distance(cloud.points[i], expect[i]) < 1e-30);
  }
  SUBCASE("sphere random mean") {
    const auto cloud = sample_manifold(ManifoldSpec::sphere(), 100000, 3, SamplingMode::kUniformRandom);
    Point mean{};
    for (const Point& p : cloud.points)
      for (int c = 0; c < 4; ++c) mean[c] += p[c] / 1e5;
    CHECK(norm(mean) < 0.02);
  }
  SUBCASE("torus quasi-uniform grid") {
    const auto spec = ManifoldSpec::clifford_torus(1.3);
    const auto cloud = sample_manifold(spec, 16, 0, SamplingMode::kQuasiUniform);
    CHECK(torus_grid_shape(16) == std::array<std::size_t, 2>{4, 4});
    for (const Point& p : cloud.points) CHECK(norm(p) == doctest::Approx(1.3).epsilon(1e-14));
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < i; ++j) CHECK(squared_distance(cloud.points[i], cloud.points[j]) > 0.1);
  }
  SUBCASE("grid shapes") {
    CHECK(torus_grid_shape(12) == std::array<std::size_t, 2>{3, 4});
    CHECK(torus_grid_shape(7) == std::array<std::size_t, 2>{1, 7});
  }
  SUBCASE("on manifold and deterministic") {
    for (auto spec : {ManifoldSpec::circle(2), ManifoldSpec::sphere(0.7), ManifoldSpec::clifford_torus(3)})
      for (auto mode : {SamplingMode::kUniformRandom, SamplingMode::kQuasiUniform}) {
        const auto a = sample_manifold(spec, 2000, 11, mode);
        const auto b = sample_manifold(spec, 2000, 11, mode);
        CHECK(a.points == b.points);
        double worst = 0;
        for (const Point& p : a.points) worst = std::max(worst, spec.constraint_residual(p));
        CHECK(worst <= 1e-12 * spec.scale);
      }
    const auto a = sample_manifold(ManifoldSpec::sphere(), 10, 1, SamplingMode::kUniformRandom);
    const auto b = sample_manifold(ManifoldSpec::sphere(), 10, 2, SamplingMode::kUniformRandom);
    CHECK(a.points != b.points);
  }
  SUBCASE("prefix stability") {
    // Point i depends only on (seed, i).
    const auto a = sample_manifold(ManifoldSpec::sphere(), 50, 5, SamplingMode::kUniformRandom);
    const auto b = sample_manifold(ManifoldSpec::sphere(), 80, 5, SamplingMode::kUniformRandom);
    CHECK(std::equal(a.points.begin(), a.points.end(), b.points.begin()));
  }
  CHECK_THROWS_AS(sample_manifold(ManifoldSpec::circle(), 0, 0, SamplingMode::kUniformRandom), InvalidArgument);
}

TEST_CASE("sample_labeled") {
  SUBCASE("constant labels") {
    const auto set = sample_labeled(quarter_arc(), 3, 1, LabelFunction::from_id("const:1"));
    CHECK(set.values == std::vector<double>{1, 1, 1});
  }
  SUBCASE("sin on the arc stays in range") {
    const auto set = sample_labeled(quarter_arc(), 5000, 2, LabelFunction::sin_theta());
    for (double v : set.values) {
      CHECK(v >= -kSqrt2 / 2 - 1e-15);
      CHECK(v <= kSqrt2 / 2 + 1e-15);
    }
  }
  SUBCASE("cap membership, off-pole center too") {
    for (Intrinsic c : {Intrinsic{0, 0}, Intrinsic{1.1, -2.0}}) {
      const RegionSpec cap{ManifoldSpec::sphere(), RegionKind::kCap, c, 0.5};
      const auto set = sample_labeled(cap, 100, 4, LabelFunction::coordinate(2));
      const Point center = cap.manifold.embed(c);
      for (const Point& p : set.points) {
        CHECK(cap.manifold.geodesic_distance(p, center) <= 0.5 + 1e-12);
        CHECK(cap.manifold.constraint_residual(p) < 1e-12);
      }
    }
  }
  SUBCASE("band membership") {
    const auto torus = ManifoldSpec::clifford_torus();
    const RegionSpec band{torus, RegionKind::kBand, {0.5, 0}, 0.2};
    const auto set = sample_labeled(band, 300, 4, LabelFunction::coordinate(3));
    for (std::size_t i = 0; i < set.size(); ++i) {
      CHECK(band.contains(set.points[i]));
      CHECK(set.values[i] == set.points[i][3]);
    }
  }
  CHECK_THROWS_AS(sample_labeled(quarter_arc(), 0, 1, LabelFunction::sin_theta()), InvalidArgument);
  const RegionSpec cap{ManifoldSpec::sphere(), RegionKind::kCap, {0, 0}, 0.5};
  CHECK_THROWS_AS(sample_labeled(cap, 3, 1, LabelFunction::sin_theta()), InvalidArgument);
  CHECK_THROWS_AS(sample_labeled(cap, 3, 1, LabelFunction::coordinate(3)), InvalidArgument);
}

TEST_CASE("distance to region") {
  const auto arc = quarter_arc();
  const auto& c = arc.manifold;
  CHECK(geodesic_distance_to_region(arc, c.embed({kPi / 4, 0})) == doctest::Approx(0).epsilon(1e-15));
  CHECK(geodesic_distance_to_region(arc, c.embed({kPi, 0})) == doctest::Approx(3 * kPi / 4));
  CHECK(geodesic_distance_to_region(arc, c.embed({0.1, 0})) == 0.0);
  const RegionSpec cap{ManifoldSpec::sphere(), RegionKind::kCap, {0, 0}, 0.5};
  CHECK(geodesic_distance_to_region(cap, cap.manifold.embed({1.2, 2.0})) == doctest::Approx(0.7));
  const auto torus = ManifoldSpec::clifford_torus(2);
  const RegionSpec band{torus, RegionKind::kBand, {0, 0}, 0.3};
  CHECK(geodesic_distance_to_region(band, torus.embed({1.0, 2.5})) == doctest::Approx(kSqrt2 * 1.0 - 0.3));
  CHECK_THROWS_AS(geodesic_distance_to_region(arc, Point{2, 0, 0, 0}), InvalidArgument);
  CHECK(arc.volume() == doctest::Approx(kPi / 2));
  const RegionSpec bad{ManifoldSpec::sphere(), RegionKind::kArc, {0, 0}, 0.5};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("Laplace-Beltrami against finite differences") {
  CHECK(laplace_beltrami_reference(ManifoldSpec::circle(), LabelFunction::sin_theta(),
                                   ManifoldSpec::circle().embed({0.7, 0})) == doctest::Approx(-std::sin(0.7)));
  const auto sphere = ManifoldSpec::sphere();
  const Point x = sphere.embed({0.9, 0.4});
  CHECK(laplace_beltrami_reference(sphere, LabelFunction::coordinate(2), x) == doctest::Approx(-2 * x[2]));

  const std::vector<std::pair<ManifoldSpec, std::vector<LabelFunction>>> cases = {
      {ManifoldSpec::circle(1.7), {LabelFunction::sin_theta(), LabelFunction::coordinate(0), LabelFunction::coordinate(1)}},
      {ManifoldSpec::sphere(1.3), {LabelFunction::coordinate(0), LabelFunction::coordinate(1), LabelFunction::coordinate(2)}},
      {ManifoldSpec::clifford_torus(1.1),
       {LabelFunction::sin_theta(), LabelFunction::coordinate(0), LabelFunction::coordinate(3)}},
  };
  for (const auto& [spec, fns] : cases)
    for (const auto& fn : fns)
      for (Intrinsic t : {Intrinsic{0.4, 1.3}, Intrinsic{2.2, -0.8}, Intrinsic{1.0, 3.0}}) {
        if (spec.kind == ManifoldKind::kCircle) t[1] = 0;
        const double want = fd_laplacian(spec, fn, t);
        const double got = laplace_beltrami_reference(spec, fn, spec.embed(t));
        CHECK(std::abs(got - want) <= 1e-5 * std::max(1.0, std::abs(want)));
      }
  for (auto spec : {ManifoldSpec::circle(), ManifoldSpec::sphere(), ManifoldSpec::clifford_torus()})
    CHECK(laplace_beltrami_reference(spec, LabelFunction::from_id("const:3"), spec.embed({0.5, 0.5})) == 0.0);
  auto tab = LabelFunction::from_id("tabulated");
  tab.table = {0, 1, 0, -1};
  CHECK_THROWS_AS(laplace_beltrami_reference(ManifoldSpec::circle(), tab, Point{1, 0, 0, 0}), InvalidArgument);
}

TEST_CASE("label function registry") {
  CHECK(LabelFunction::from_id("coord:2") == LabelFunction::coordinate(2));
  CHECK(LabelFunction::from_id(LabelFunction::sin_theta().id()) == LabelFunction::sin_theta());
  CHECK(LabelFunction::from_id("const:2.5").value(ManifoldSpec::circle(), Point{1, 0, 0, 0}) == 2.5);
  CHECK(LabelFunction::sin_theta().shifted(1).value(ManifoldSpec::circle(), Point{0, 1, 0, 0}) == 2.0);
  CHECK_THROWS_AS(LabelFunction::from_id("cos_theta"), InvalidArgument);
  CHECK_THROWS_AS(LabelFunction::from_id("coord:x"), InvalidArgument);
  auto tab = LabelFunction::from_id("tabulated");
  tab.table = {0, 1, 0, -1};
  // Linear between equispaced samples at 0, pi/2, pi, 3pi/2.
  CHECK(tab.value(ManifoldSpec::circle(), ManifoldSpec::circle().embed({kPi / 4, 0})) == doctest::Approx(0.5));
  CHECK(tab.value(ManifoldSpec::circle(), ManifoldSpec::circle().embed({-kPi / 4, 0})) == doctest::Approx(-0.5));
}

TEST_CASE("circle reference solution") {
  const auto arc = quarter_arc();
  const auto& c = arc.manifold;
  const auto u = reference_harmonic_solution(arc, LabelFunction::sin_theta(),
                                             {c.embed({kPi, 0}), c.embed({kPi / 2, 0}), c.embed({0.3, 0})});
  CHECK(u[0] == doctest::Approx(0).epsilon(1e-15));
  CHECK(u[1] == doctest::Approx(kSqrt2 / 2 - 2 * kSqrt2 / (3 * kPi) * (kPi / 4)));
  CHECK(u[1] == doctest::Approx(0.4714).epsilon(1e-4));
  CHECK(u[2] == std::sin(0.3));
  // Linear in arclength off the arc.
  const double h = 0.01;
  for (double t : {1.0, 2.0, 3.5, 5.0}) {
    const auto v = reference_harmonic_solution(arc, LabelFunction::sin_theta(),
                                               {c.embed({t - h, 0}), c.embed({t, 0}), c.embed({t + h, 0})});
    CHECK(std::abs(v[0] - 2 * v[1] + v[2]) <= 1e-12);
  }
}

TEST_CASE("constant data gives constant references") {
  const RegionSpec cap{ManifoldSpec::sphere(), RegionKind::kCap, {0, 0}, 0.5};
  const RegionSpec band{ManifoldSpec::clifford_torus(), RegionKind::kBand, {0, 0}, 0.3};
  for (const auto& region : {quarter_arc(), cap, band}) {
    const auto cloud = sample_manifold(region.manifold, 20, 1, SamplingMode::kUniformRandom);
    for (double v : reference_harmonic_solution(region, LabelFunction::from_id("const:2.5"), cloud.points))
      CHECK(v == doctest::Approx(2.5).epsilon(1e-9));
  }
}

TEST_CASE("sphere reference for axisymmetric data") {
  // Bounded harmonic functions of colatitude alone are constant off the cap,
  // so the solution is the boundary value cos(rho).
  const RegionSpec cap{ManifoldSpec::sphere(), RegionKind::kCap, {0, 0}, 0.5};
  const auto& s = cap.manifold;
  const PointList q = {s.embed({0.2, 0}), s.embed({1.0, 1}), s.embed({2.5, 2}), s.embed({3.1, -1})};
  const auto u = reference_harmonic_solution(cap, LabelFunction::coordinate(2), q);
  CHECK(u[0] == doctest::Approx(q[0][2]));
  for (int i = 1; i < 4; ++i) CHECK(u[i] == doctest::Approx(std::cos(0.5)).epsilon(1e-6));
  const RegionSpec off{s, RegionKind::kCap, {1.0, 0}, 0.5};
  CHECK_THROWS_AS(reference_harmonic_solution(off, LabelFunction::coordinate(2), q), InvalidArgument);
  CHECK_THROWS_AS(reference_harmonic_solution(cap, LabelFunction::coordinate(0), q), InvalidArgument);
}

TEST_CASE("torus reference") {
  const auto torus = ManifoldSpec::clifford_torus();
  const double a = torus.torus_radius();
  const RegionSpec band{torus, RegionKind::kBand, {0, 0}, 0.3};
  PointList q;
  for (Intrinsic t : {Intrinsic{1.0, 0.2}, Intrinsic{2.0, 2.0}, Intrinsic{3.5, -1.0}, Intrinsic{5.0, 0.7}})
    q.push_back(torus.embed(t));

  SUBCASE("theta-only data reduces to the circle solution") {
    // Linear in theta between the band edges at +-0.3 / a.
    const double half = 0.3 / a;
    const auto u = reference_harmonic_solution(band, LabelFunction::sin_theta(), q);
    for (std::size_t i = 0; i < q.size(); ++i) {
      double t = torus.chart(q[i])[0];
      if (t < 0) t += kTwoPi;
      const double s = (t - half) / (kTwoPi - 2 * half);
      CHECK(u[i] == doctest::Approx(std::sin(half) + (std::sin(-half) - std::sin(half)) * s).epsilon(1e-5));
    }
  }
  SUBCASE("second-order self-convergence") {
    const auto fn = LabelFunction::coordinate(2);
    const auto u1 = reference_at_resolution(band, fn, q, 64);
    const auto u2 = reference_at_resolution(band, fn, q, 128);
    const auto u3 = reference_at_resolution(band, fn, q, 256);
    double d12 = 0, d23 = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      d12 = std::max(d12, std::abs(u1[i] - u2[i]));
      d23 = std::max(d23, std::abs(u2[i] - u3[i]));
    }
    MESSAGE("successive differences " << d12 << " " << d23);
    CHECK(d12 / d23 > 3.0);
    CHECK(d12 / d23 < 5.5);
  }
}
