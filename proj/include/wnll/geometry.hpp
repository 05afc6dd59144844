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

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wnll/types.hpp"

namespace wnll {

/// Intrinsic coordinates. Circle: (theta, unused). Sphere: (colatitude,
/// longitude). Clifford torus: (theta, phi).
using Intrinsic = std::array<double, 2>;

enum class ManifoldKind { kCircle, kSphere, kCliffordTorus };

std::string to_string(ManifoldKind kind);
ManifoldKind parse_manifold_kind(std::string_view name);

/// A closed manifold with closed-form metric, volume and geodesics.
///
/// `scale` is the radius of the circle or sphere. The Clifford torus is
/// embedded as a (cos t, sin t, cos p, sin p) with a = scale / sqrt(2), so every
/// torus point has ambient norm `scale`.
struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::kCircle;
  double scale = 1.0;

  static ManifoldSpec circle(double radius = 1.0) { return {ManifoldKind::kCircle, radius}; }
  static ManifoldSpec sphere(double radius = 1.0) { return {ManifoldKind::kSphere, radius}; }
  static ManifoldSpec clifford_torus(double scale = 1.0) { return {ManifoldKind::kCliffordTorus, scale}; }

  int intrinsic_dim() const;
  int ambient_dim() const;
  double volume() const;
  /// Radius of each factor circle of the torus.
  double torus_radius() const;

  Point embed(const Intrinsic& t) const;
  Intrinsic chart(const Point& x) const;
  /// Distance of x from the manifold's defining constraints.
  double constraint_residual(const Point& x) const;
  /// Geodesic distance between two points on the manifold.
  double geodesic_distance(const Point& x, const Point& y) const;

  void validate() const;
  bool operator==(const ManifoldSpec&) const = default;
};

/// Tolerance (relative to scale) for accepting externally supplied points as on-manifold.
inline constexpr double kOnManifoldTolerance = 1e-8;

void require_on_manifold(const ManifoldSpec& spec, const Point& x);

enum class RegionKind { kArc, kCap, kBand };

std::string to_string(RegionKind kind);
RegionKind parse_region_kind(std::string_view name);

/// Labeled region D. Arc (circle): geodesic ball about `center[0]`. Cap
/// (sphere): geodesic ball about the point with intrinsic coordinates
/// `center`. Band (torus): all points whose theta-arclength distance to
/// `center[0]` is at most `radius`.
struct RegionSpec {
  ManifoldSpec manifold;
  RegionKind kind = RegionKind::kArc;
  Intrinsic center{0.0, 0.0};
  double radius = 0.0;

  void validate() const;
  double volume() const;
  /// Exact geodesic distance from x (on the manifold) to the region; zero inside.
  double distance(const Point& x) const;
  bool contains(const Point& x) const { return distance(x) <= 1e-12 * manifold.scale; }
  bool operator==(const RegionSpec&) const = default;
};

enum class LabelKind { kConstant, kCoordinate, kSinTheta, kTabulated };

/// Named label/test functions with registered derivatives.
///
/// Ids: "const:<c>", "coord:<axis>", "sin_theta", "tabulated". Every kind
/// accepts an additive `offset`. Tabulated functions hold equispaced periodic
/// samples over the first intrinsic angle, interpolated linearly; they carry no
/// second derivatives.
struct LabelFunction {
  LabelKind kind = LabelKind::kConstant;
  double constant = 0.0;
  int axis = 0;
  double offset = 0.0;
  std::vector<double> table;

  static LabelFunction from_id(std::string_view id);
  static LabelFunction constant_value(double c) { return {LabelKind::kConstant, c, 0, 0.0, {}}; }
  static LabelFunction coordinate(int axis) { return {LabelKind::kCoordinate, 0.0, axis, 0.0, {}}; }
  static LabelFunction sin_theta() { return {LabelKind::kSinTheta, 0.0, 0, 0.0, {}}; }
  LabelFunction shifted(double delta) const {
    LabelFunction f = *this;
    f.offset += delta;
    return f;
  }

  std::string id() const;

  /// Throws InvalidArgument if the function is not defined on `spec`.
  void check_defined(const ManifoldSpec& spec) const;
  double value(const ManifoldSpec& spec, const Point& x) const;
  bool has_laplacian() const { return kind != LabelKind::kTabulated; }
  /// Laplace-Beltrami of the function at x from the closed-form metric.
  double laplacian(const ManifoldSpec& spec, const Point& x) const;

  bool operator==(const LabelFunction&) const = default;
};

enum class SamplingMode { kUniformRandom, kQuasiUniform };

std::string to_string(SamplingMode mode);
SamplingMode parse_sampling_mode(std::string_view name);

struct PointCloud {
  ManifoldSpec spec;
  PointList points;
  std::uint64_t seed = 0;
  SamplingMode mode = SamplingMode::kUniformRandom;

  std::size_t size() const { return points.size(); }
};

struct LabeledSet {
  PointList points;
  std::vector<double> values;
  /// Unknown when the set was loaded from a bare CSV file.
  std::optional<RegionSpec> region;
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
};

/// n points on the manifold. Random mode draws i.i.d. from the normalized
/// volume measure; quasi-uniform mode lays out equispaced angles (circle), a
/// Fibonacci lattice (sphere) or a product angle grid (torus).
PointCloud sample_manifold(const ManifoldSpec& spec, std::size_t n, std::uint64_t seed,
                           SamplingMode mode);

/// Torus product grid shape (rows, cols) used in quasi-uniform mode: the
/// factor pair of n closest to square, rows <= cols.
std::array<std::size_t, 2> torus_grid_shape(std::size_t n);

LabeledSet sample_labeled(const RegionSpec& region, std::size_t m, std::uint64_t seed,
                          const LabelFunction& label_fn);

double geodesic_distance_to_region(const RegionSpec& region, const Point& x);

double laplace_beltrami_reference(const ManifoldSpec& spec, const LabelFunction& fn, const Point& x);

struct ReferenceOptions {
  /// Grid resolution of the first finite-difference solve (sphere and torus).
  std::size_t resolution = 64;
  /// Successive-refinement stopping tolerance (max-norm over the queries).
  double tolerance = 1e-6;
  std::size_t max_resolution = 4096;
};

/// Solution of the Laplace-Beltrami interpolation problem (harmonic off D, equal
/// to the label function on D) at the queries. Circle: closed form. Sphere:
/// axisymmetric finite-volume ODE in colatitude. Torus: periodic
/// finite-difference solve, refined until successive answers agree.
std::vector<double> reference_harmonic_solution(const RegionSpec& region, const LabelFunction& label_fn,
                                                const PointList& queries,
                                                const ReferenceOptions& options = {});

/// A single finite-difference solve at a fixed resolution, no refinement.
/// Exposed for convergence studies of the oracle itself.
std::vector<double> reference_at_resolution(const RegionSpec& region, const LabelFunction& label_fn,
                                            const PointList& queries, std::size_t resolution);

}  // namespace wnll
