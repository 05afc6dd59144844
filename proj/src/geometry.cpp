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

#include "wnll/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "wnll/random.hpp"

namespace wnll {

namespace {

double wrap_angle(double a) { return std::remainder(a, kTwoPi); }

double angle_between(const Point& x, const Point& y) {
  // Circle and sphere points live in the first three coordinates.
  const double dot = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
  const double cx = x[1] * y[2] - x[2] * y[1];
  const double cy = x[2] * y[0] - x[0] * y[2];
  const double cz = x[0] * y[1] - x[1] * y[0];
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
}

double parse_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw InvalidArgument("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::string to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::kCircle:
      return "circle";
    case ManifoldKind::kSphere:
      return "sphere";
    case ManifoldKind::kCliffordTorus:
      return "clifford_torus";
  }
  return "?";
}

ManifoldKind parse_manifold_kind(std::string_view name) {
  if (name == "circle") return ManifoldKind::kCircle;
  if (name == "sphere") return ManifoldKind::kSphere;
  if (name == "clifford_torus") return ManifoldKind::kCliffordTorus;
  throw InvalidArgument("unsupported manifold kind '" + std::string(name) + "'");
}

int ManifoldSpec::intrinsic_dim() const { return kind == ManifoldKind::kCircle ? 1 : 2; }

int ManifoldSpec::ambient_dim() const {
  switch (kind) {
    case ManifoldKind::kCircle:
      return 2;
    case ManifoldKind::kSphere:
      return 3;
    case ManifoldKind::kCliffordTorus:
      return 4;
  }
  return 0;
}

double ManifoldSpec::torus_radius() const { return scale / std::numbers::sqrt2; }

double ManifoldSpec::volume() const {
  switch (kind) {
    case ManifoldKind::kCircle:
      return kTwoPi * scale;
    case ManifoldKind::kSphere:
      return 2.0 * kTwoPi * scale * scale;
    case ManifoldKind::kCliffordTorus: {
      const double a = torus_radius();
      return kTwoPi * a * kTwoPi * a;
    }
  }
  return 0.0;
}

void ManifoldSpec::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("manifold scale must be positive");
}

Point ManifoldSpec::embed(const Intrinsic& t) const {
  switch (kind) {
    case ManifoldKind::kCircle:
      return {scale * std::cos(t[0]), scale * std::sin(t[0]), 0.0, 0.0};
    case ManifoldKind::kSphere: {
      const double s = std::sin(t[0]);
      return {scale * s * std::cos(t[1]), scale * s * std::sin(t[1]), scale * std::cos(t[0]), 0.0};
    }
    case ManifoldKind::kCliffordTorus: {
      const double a = torus_radius();
      return {a * std::cos(t[0]), a * std::sin(t[0]), a * std::cos(t[1]), a * std::sin(t[1])};
    }
  }
  return {};
}

Intrinsic ManifoldSpec::chart(const Point& x) const {
  switch (kind) {
    case ManifoldKind::kCircle:
      return {std::atan2(x[1], x[0]), 0.0};
    case ManifoldKind::kSphere:
      return {std::atan2(std::hypot(x[0], x[1]), x[2]), std::atan2(x[1], x[0])};
    case ManifoldKind::kCliffordTorus:
      return {std::atan2(x[1], x[0]), std::atan2(x[3], x[2])};
  }
  return {};
}

double ManifoldSpec::constraint_residual(const Point& x) const {
  switch (kind) {
    case ManifoldKind::kCircle:
      return std::abs(std::hypot(x[0], x[1]) - scale) + std::abs(x[2]) + std::abs(x[3]);
    case ManifoldKind::kSphere:
      return std::abs(std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) - scale) + std::abs(x[3]);
    case ManifoldKind::kCliffordTorus: {
      const double a = torus_radius();
      return std::abs(std::hypot(x[0], x[1]) - a) + std::abs(std::hypot(x[2], x[3]) - a);
    }
  }
  return 0.0;
}

double ManifoldSpec::geodesic_distance(const Point& x, const Point& y) const {
  switch (kind) {
    case ManifoldKind::kCircle:
    case ManifoldKind::kSphere:
      return scale * angle_between(x, y);
    case ManifoldKind::kCliffordTorus: {
      const Intrinsic a = chart(x);
      const Intrinsic b = chart(y);
      return torus_radius() * std::hypot(wrap_angle(a[0] - b[0]), wrap_angle(a[1] - b[1]));
    }
  }
  return 0.0;
}

void require_on_manifold(const ManifoldSpec& spec, const Point& x) {
  for (double v : x)
    if (!std::isfinite(v)) throw InvalidArgument("point has non-finite coordinates");
  if (spec.constraint_residual(x) > kOnManifoldTolerance * spec.scale)
    throw InvalidArgument("point is not on the " + to_string(spec.kind));
}

std::string to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::kArc:
      return "arc";
    case RegionKind::kCap:
      return "cap";
    case RegionKind::kBand:
      return "band";
  }
  return "?";
}

RegionKind parse_region_kind(std::string_view name) {
  if (name == "arc") return RegionKind::kArc;
  if (name == "cap") return RegionKind::kCap;
  if (name == "band") return RegionKind::kBand;
  throw InvalidArgument("unsupported region kind '" + std::string(name) + "'");
}

void RegionSpec::validate() const {
  manifold.validate();
  if (!(radius > 0.0)) throw InvalidArgument("region radius must be positive");
  double limit = 0.0;
  switch (kind) {
    case RegionKind::kArc:
      if (manifold.kind != ManifoldKind::kCircle) throw InvalidArgument("arc regions live on the circle");
      limit = kPi * manifold.scale;
      break;
    case RegionKind::kCap:
      if (manifold.kind != ManifoldKind::kSphere) throw InvalidArgument("cap regions live on the sphere");
      limit = kPi * manifold.scale;
      break;
    case RegionKind::kBand:
      if (manifold.kind != ManifoldKind::kCliffordTorus)
        throw InvalidArgument("band regions live on the Clifford torus");
      limit = kPi * manifold.torus_radius();
      break;
  }
  if (radius >= limit) throw InvalidArgument("region must be a proper subset of the manifold");
}

double RegionSpec::volume() const {
  switch (kind) {
    case RegionKind::kArc:
      return 2.0 * radius;
    case RegionKind::kCap: {
      const double r = manifold.scale;
      return kTwoPi * r * r * (1.0 - std::cos(radius / r));
    }
    case RegionKind::kBand:
      return 2.0 * radius * kTwoPi * manifold.torus_radius();
  }
  return 0.0;
}

double RegionSpec::distance(const Point& x) const {
  switch (kind) {
    case RegionKind::kArc: {
      const double theta = manifold.chart(x)[0];
      return std::max(0.0, manifold.scale * std::abs(wrap_angle(theta - center[0])) - radius);
    }
    case RegionKind::kCap:
      return std::max(0.0, manifold.scale * angle_between(x, manifold.embed(center)) - radius);
    case RegionKind::kBand: {
      const double theta = manifold.chart(x)[0];
      return std::max(0.0, manifold.torus_radius() * std::abs(wrap_angle(theta - center[0])) - radius);
    }
  }
  return 0.0;
}

double geodesic_distance_to_region(const RegionSpec& region, const Point& x) {
  region.validate();
  require_on_manifold(region.manifold, x);
  return region.distance(x);
}

// ---------------------------------------------------------------------------
// Label functions

LabelFunction LabelFunction::from_id(std::string_view id) {
  if (id == "sin_theta") return sin_theta();
  if (id == "tabulated") return {LabelKind::kTabulated, 0.0, 0, 0.0, {}};
  if (id.starts_with("const:")) return constant_value(parse_double(id.substr(6), "constant"));
  if (id.starts_with("coord:")) {
    const double a = parse_double(id.substr(6), "axis");
    if (a != std::floor(a) || a < 0 || a >= kMaxAmbientDim) throw InvalidArgument("bad coordinate axis");
    return coordinate(static_cast<int>(a));
  }
  throw InvalidArgument("unknown label function '" + std::string(id) + "'");
}

std::string LabelFunction::id() const {
  switch (kind) {
    case LabelKind::kConstant:
      return "const:" + format_double(constant);
    case LabelKind::kCoordinate:
      return "coord:" + std::to_string(axis);
    case LabelKind::kSinTheta:
      return "sin_theta";
    case LabelKind::kTabulated:
      return "tabulated";
  }
  return "?";
}

void LabelFunction::check_defined(const ManifoldSpec& spec) const {
  switch (kind) {
    case LabelKind::kConstant:
      if (!std::isfinite(constant)) throw InvalidArgument("constant label must be finite");
      break;
    case LabelKind::kCoordinate:
      if (axis < 0 || axis >= spec.ambient_dim())
        throw InvalidArgument("coordinate axis out of range for " + to_string(spec.kind));
      break;
    case LabelKind::kSinTheta:
      if (spec.kind == ManifoldKind::kSphere)
        throw InvalidArgument("sin_theta is not defined on the sphere");
      break;
    case LabelKind::kTabulated:
      if (spec.kind == ManifoldKind::kSphere)
        throw InvalidArgument("tabulated labels are not defined on the sphere");
      if (table.empty()) throw InvalidArgument("tabulated label function has an empty table");
      for (double v : table)
        if (!std::isfinite(v)) throw InvalidArgument("tabulated label values must be finite");
      break;
  }
  if (!std::isfinite(offset)) throw InvalidArgument("label offset must be finite");
}

double LabelFunction::value(const ManifoldSpec& spec, const Point& x) const {
  switch (kind) {
    case LabelKind::kConstant:
      return constant + offset;
    case LabelKind::kCoordinate:
      return x[axis] + offset;
    case LabelKind::kSinTheta:
      return std::sin(spec.chart(x)[0]) + offset;
    case LabelKind::kTabulated: {
      double theta = spec.chart(x)[0];
      if (theta < 0.0) theta += kTwoPi;
      const double pos = theta / kTwoPi * static_cast<double>(table.size());
      const auto i = static_cast<std::size_t>(std::floor(pos)) % table.size();
      const double frac = pos - std::floor(pos);
      return (1.0 - frac) * table[i] + frac * table[(i + 1) % table.size()] + offset;
    }
  }
  return 0.0;
}

double LabelFunction::laplacian(const ManifoldSpec& spec, const Point& x) const {
  const double r = spec.scale;
  const double a = spec.torus_radius();
  switch (kind) {
    case LabelKind::kConstant:
      return 0.0;
    case LabelKind::kCoordinate:
      // Coordinates are first eigenfunctions: -x/r^2 (circle), -2x/r^2
      // (sphere), -x/a^2 (each torus factor circle).
      switch (spec.kind) {
        case ManifoldKind::kCircle:
          return -x[axis] / (r * r);
        case ManifoldKind::kSphere:
          return -2.0 * x[axis] / (r * r);
        case ManifoldKind::kCliffordTorus:
          return -x[axis] / (a * a);
      }
      return 0.0;
    case LabelKind::kSinTheta: {
      const double s = std::sin(spec.chart(x)[0]);
      return spec.kind == ManifoldKind::kCircle ? -s / (r * r) : -s / (a * a);
    }
    case LabelKind::kTabulated:
      throw InvalidArgument("tabulated label function has no registered second derivatives");
  }
  return 0.0;
}

double laplace_beltrami_reference(const ManifoldSpec& spec, const LabelFunction& fn, const Point& x) {
  fn.check_defined(spec);
  require_on_manifold(spec, x);
  return fn.laplacian(spec, x);
}

// ---------------------------------------------------------------------------
// Sampling

std::string to_string(SamplingMode mode) {
  return mode == SamplingMode::kUniformRandom ? "uniform_random" : "quasi_uniform";
}

SamplingMode parse_sampling_mode(std::string_view name) {
  if (name == "uniform_random") return SamplingMode::kUniformRandom;
  if (name == "quasi_uniform") return SamplingMode::kQuasiUniform;
  throw InvalidArgument("unknown sampling mode '" + std::string(name) + "'");
}

std::array<std::size_t, 2> torus_grid_shape(std::size_t n) {
  std::size_t rows = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  while (rows > 1 && n % rows != 0) --rows;
  rows = std::max<std::size_t>(rows, 1);
  return {rows, n / rows};
}

PointCloud sample_manifold(const ManifoldSpec& spec, std::size_t n, std::uint64_t seed, SamplingMode mode) {
  spec.validate();
  if (n < 1) throw InvalidArgument("sample_manifold needs n >= 1");
  PointCloud cloud{spec, PointList(n), seed, mode};
  const auto stream = static_cast<std::uint64_t>(Stream::kCloud);
  const double dn = static_cast<double>(n);
  if (mode == SamplingMode::kUniformRandom) {
    for (std::size_t i = 0; i < n; ++i) {
      const double u0 = counter_uniform(seed, stream, i, 0);
      const double u1 = counter_uniform(seed, stream, i, 1);
      switch (spec.kind) {
        case ManifoldKind::kCircle:
          cloud.points[i] = spec.embed({kTwoPi * u0, 0.0});
          break;
        case ManifoldKind::kSphere: {
          // Archimedes: z is uniform under the area measure.
          const double z = 1.0 - 2.0 * u0;
          const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
          const double phi = kTwoPi * u1;
          cloud.points[i] = {spec.scale * s * std::cos(phi), spec.scale * s * std::sin(phi), spec.scale * z, 0.0};
          break;
        }
        case ManifoldKind::kCliffordTorus:
          // Flat metric: uniform angles are uniform in area.
          cloud.points[i] = spec.embed({kTwoPi * u0, kTwoPi * u1});
          break;
      }
    }
    return cloud;
  }
  switch (spec.kind) {
    case ManifoldKind::kCircle:
      for (std::size_t i = 0; i < n; ++i) cloud.points[i] = spec.embed({kTwoPi * static_cast<double>(i) / dn, 0.0});
      break;
    case ManifoldKind::kSphere: {
      const double golden = kPi * (3.0 - std::sqrt(5.0));
      for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / dn;
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = std::fmod(golden * static_cast<double>(i), kTwoPi);
        cloud.points[i] = {spec.scale * s * std::cos(phi), spec.scale * s * std::sin(phi), spec.scale * z, 0.0};
      }
      break;
    }
    case ManifoldKind::kCliffordTorus: {
      const auto [rows, cols] = torus_grid_shape(n);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
          cloud.points[r * cols + c] = spec.embed({kTwoPi * static_cast<double>(r) / static_cast<double>(rows),
                                                   kTwoPi * static_cast<double>(c) / static_cast<double>(cols)});
      break;
    }
  }
  return cloud;
}

LabeledSet sample_labeled(const RegionSpec& region, std::size_t m, std::uint64_t seed,
                          const LabelFunction& label_fn) {
  region.validate();
  if (m < 1) throw InvalidArgument("sample_labeled needs m >= 1");
  const ManifoldSpec& spec = region.manifold;
  label_fn.check_defined(spec);
  LabeledSet set{PointList(m), std::vector<double>(m), region, seed};
  const auto stream = static_cast<std::uint64_t>(Stream::kLabels);

  // Orthonormal frame about the cap center.
  Point c{}, e1{}, e2{};
  if (region.kind == RegionKind::kCap) {
    c = spec.embed(region.center);
    for (double& v : c) v /= spec.scale;
    int least = 0;
    for (int k = 1; k < 3; ++k)
      if (std::abs(c[k]) < std::abs(c[least])) least = k;
    Point axis{};
    axis[least] = 1.0;
    const double proj = c[least];
    for (int k = 0; k < 3; ++k) e1[k] = axis[k] - proj * c[k];
    const double len = norm(e1);
    for (double& v : e1) v /= len;
    e2 = {c[1] * e1[2] - c[2] * e1[1], c[2] * e1[0] - c[0] * e1[2], c[0] * e1[1] - c[1] * e1[0], 0.0};
  }

  for (std::size_t i = 0; i < m; ++i) {
    const double u0 = counter_uniform(seed, stream, i, 0);
    const double u1 = counter_uniform(seed, stream, i, 1);
    Point x{};
    switch (region.kind) {
      case RegionKind::kArc:
        x = spec.embed({region.center[0] + region.radius / spec.scale * (2.0 * u0 - 1.0), 0.0});
        break;
      case RegionKind::kCap: {
        const double cos_max = std::cos(region.radius / spec.scale);
        const double ca = 1.0 - u0 * (1.0 - cos_max);
        const double sa = std::sqrt(std::max(0.0, 1.0 - ca * ca));
        const double beta = kTwoPi * u1;
        for (int k = 0; k < 3; ++k)
          x[k] = spec.scale * (sa * std::cos(beta) * e1[k] + sa * std::sin(beta) * e2[k] + ca * c[k]);
        break;
      }
      case RegionKind::kBand: {
        const double half = region.radius / spec.torus_radius();
        x = spec.embed({region.center[0] + half * (2.0 * u0 - 1.0), kTwoPi * u1});
        break;
      }
    }
    set.points[i] = x;
    set.values[i] = label_fn.value(spec, x);
    if (!std::isfinite(set.values[i])) throw InvalidArgument("label function is not finite on the region");
  }
  return set;
}

}  // namespace wnll
