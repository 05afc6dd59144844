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

#include "wnll/discrepancy.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "wnll/neighbor_index.hpp"
#include "wnll/parallel.hpp"

namespace wnll {
namespace {

// 4-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 4> kGaussNodes{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                            0.8611363115940526};
constexpr std::array<double, 4> kGaussWeights{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                              0.3478548451374538};

double circle_level(const ManifoldSpec& spec, const Integrand& f, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += f(spec.embed({kTwoPi * static_cast<double>(i) / static_cast<double>(n), 0.0}));
  return s / static_cast<double>(n);
}

double torus_level(const ManifoldSpec& spec, const Integrand& f, std::size_t n) {
  std::vector<double> rows(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double theta = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += f(spec.embed({theta, kTwoPi * static_cast<double>(j) / static_cast<double>(n)}));
      rows[i] = s;
    }
  });
  double s = 0.0;
  for (double r : rows) s += r;
  return s / (static_cast<double>(n) * static_cast<double>(n));
}

// n points in z (n / 4 panels of 4) and n longitudes.
double sphere_level(const ManifoldSpec& spec, const Integrand& f, std::size_t n) {
  const std::size_t panels = n / 4;
  const double h = 2.0 / static_cast<double>(panels);
  std::vector<double> rows(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const std::size_t panel = idx / 4, node = idx % 4;
      const double z = -1.0 + h * (static_cast<double>(panel) + 0.5 * (kGaussNodes[node] + 1.0));
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double phi = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
        s += f({spec.scale * rho * std::cos(phi), spec.scale * rho * std::sin(phi), spec.scale * z, 0.0});
      }
      rows[idx] = 0.5 * h * kGaussWeights[node] * s / static_cast<double>(n);
    }
  });
  double s = 0.0;
  for (double r : rows) s += r;
  return 0.5 * s;
}

}  // namespace

double quadrature_at_resolution(const ManifoldSpec& spec, const Integrand& f, std::size_t resolution) {
  if (resolution < 64) throw InvalidArgument("quadrature resolution must be at least 64");
  switch (spec.kind) {
    case ManifoldKind::kCircle: return circle_level(spec, f, resolution);
    case ManifoldKind::kSphere: return sphere_level(spec, f, resolution - resolution % 4);
    case ManifoldKind::kCliffordTorus: return torus_level(spec, f, resolution);
  }
  return 0.0;
}

double quadrature_integral(const ManifoldSpec& spec, const Integrand& f, const QuadratureOptions& options) {
  spec.validate();
  std::size_t max_res = options.max_resolution;
  if (max_res == 0) max_res = spec.kind == ManifoldKind::kCircle ? (std::size_t{1} << 20) : 4096;
  std::size_t res = options.resolution;
  double prev = quadrature_at_resolution(spec, f, res);
  while (2 * res <= max_res) {
    res *= 2;
    const double next = quadrature_at_resolution(spec, f, res);
    if (std::abs(next - prev) <= options.tol * std::max(1.0, std::abs(next))) return next;
    prev = next;
  }
  throw ConvergenceError("quadrature did not converge by resolution " + std::to_string(max_res));
}

PointList discrepancy_centers(const ManifoldSpec& spec, std::size_t per_dim) {
  if (per_dim == 0) throw InvalidArgument("center grid needs at least one point per direction");
  PointList out;
  const auto step = kTwoPi / static_cast<double>(per_dim);
  switch (spec.kind) {
    case ManifoldKind::kCircle:
      for (std::size_t i = 0; i < per_dim; ++i) out.push_back(spec.embed({step * static_cast<double>(i), 0.0}));
      break;
    case ManifoldKind::kSphere:
      for (std::size_t i = 0; i < per_dim; ++i) {
        const double colat = kPi * (static_cast<double>(i) + 0.5) / static_cast<double>(per_dim);
        for (std::size_t j = 0; j < per_dim; ++j) out.push_back(spec.embed({colat, step * static_cast<double>(j)}));
      }
      break;
    case ManifoldKind::kCliffordTorus:
      for (std::size_t i = 0; i < per_dim; ++i)
        for (std::size_t j = 0; j < per_dim; ++j)
          out.push_back(spec.embed({step * static_cast<double>(i), step * static_cast<double>(j)}));
      break;
  }
  return out;
}

DiscrepancyResult empirical_discrepancy(const ManifoldSpec& spec, const PointCloud& cloud,
                                        const KernelProfile& profile, const PointList& centers) {
  if (cloud.points.empty()) throw InvalidArgument("discrepancy needs a non-empty cloud");
  if (centers.empty()) throw InvalidArgument("discrepancy needs at least one center");
  for (const Point& c : centers) require_on_manifold(spec, c);
  const CompiledKernel kernel = profile.compile(KernelKind::kR);
  DiscrepancyResult out;
  out.n = cloud.size();
  out.delta = profile.delta;
  out.center_count = centers.size();
  const Point c0 = centers.front();
  out.population = quadrature_integral(spec, [&](const Point& y) { return kernel(squared_distance(c0, y)); });

  const double radius = std::isfinite(profile.r_support_radius()) ? profile.r_support_radius() : 4.0 * spec.scale;
  const NeighborIndex index(cloud.points, radius, spec.ambient_dim());
  std::vector<double> gaps(centers.size());
  parallel_for(centers.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      double s = 0.0;
      for (std::uint32_t i : index.query(centers[c], radius)) s += kernel(squared_distance(centers[c], cloud.points[i]));
      gaps[c] = std::abs(out.population - s / static_cast<double>(out.n));
    }
  });
  const auto it = std::max_element(gaps.begin(), gaps.end());
  out.sup_gap = *it;
  out.argmax_center = centers[static_cast<std::size_t>(it - gaps.begin())];
  return out;
}

double theoretical_bound(double n, double delta, int k, double c) {
  if (!(n >= 2.0) || !std::isfinite(n)) throw InvalidArgument("theoretical bound needs n >= 2");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("theoretical bound needs delta in (0, 1)");
  if (k < 1) throw InvalidArgument("intrinsic dimension must be positive");
  if (!(c >= 0.0)) throw InvalidArgument("bound constant must be nonnegative");
  return c * std::pow(delta, -k) / std::sqrt(n) * std::sqrt(std::log(n) - 2.0 * std::log(delta) + 1.0);
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t h = values.size() / 2;
  return values.size() % 2 == 1 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

DiscrepancyStudy discrepancy_study(const ManifoldSpec& spec, const KernelProfile& profile,
                                   const std::vector<std::size_t>& n_ladder, const std::vector<std::uint64_t>& seeds,
                                   SamplingMode mode, std::size_t centers_per_dim) {
  if (n_ladder.empty() || seeds.empty()) throw InvalidArgument("discrepancy study needs n values and seeds");
  const PointList centers = discrepancy_centers(spec, centers_per_dim);
  DiscrepancyStudy study;
  for (std::size_t n : n_ladder) {
    DiscrepancyRow row;
    row.n = n;
    row.delta = profile.delta;
    for (std::uint64_t seed : seeds) {
      const PointCloud cloud = sample_manifold(spec, n, seed, mode);
      row.per_seed.push_back(empirical_discrepancy(spec, cloud, profile, centers).sup_gap);
    }
    row.sup_gap = median(row.per_seed);
    study.rows.push_back(std::move(row));
  }
  const int k = spec.intrinsic_dim();
  const auto& first = study.rows.front();
  study.c_star = first.sup_gap / theoretical_bound(static_cast<double>(first.n), profile.delta, k, 1.0);
  study.bound_dominates = true;
  std::vector<double> ns, gaps;
  for (std::size_t i = 0; i < study.rows.size(); ++i) {
    auto& row = study.rows[i];
    row.bound = theoretical_bound(static_cast<double>(row.n), row.delta, k, study.c_star);
    row.ratio = row.bound > 0.0 ? row.sup_gap / row.bound : std::numeric_limits<double>::infinity();
    if (i > 0 && row.bound < row.sup_gap) study.bound_dominates = false;
    ns.push_back(static_cast<double>(row.n));
    gaps.push_back(row.sup_gap);
  }
  if (study.rows.size() >= 2) study.exponent = fit_loglog(ns, gaps);
  return study;
}

ConsistencyResult integral_consistency(const PointCloud& cloud, const KernelProfile& profile,
                                       const LabelFunction& fn, const PointList& queries, const RegionSpec& region,
                                       const QuadratureOptions& quadrature) {
  const ManifoldSpec& spec = cloud.spec;
  if (!(region.manifold == spec)) throw InvalidArgument("region lives on a different manifold");
  if (cloud.points.empty()) throw InvalidArgument("consistency needs a non-empty cloud");
  fn.check_defined(spec);
  if (!fn.has_laplacian()) throw InvalidArgument("label function '" + fn.id() + "' has no registered Laplacian");
  const double delta = profile.delta;
  for (const Point& q : queries) {
    require_on_manifold(spec, q);
    if (!(geodesic_distance_to_region(region, q) > 2.0 * delta))
      throw InvalidArgument("consistency query lies within 2 delta of the labeled region");
  }

  const CompiledKernel kernel = profile.compile(KernelKind::kR);
  const double c_delta = profile.normalization();
  const double inv4d2 = 1.0 / (4.0 * delta * delta);
  const double radius = std::isfinite(profile.r_support_radius()) ? profile.r_support_radius() : 4.0 * spec.scale;
  const NeighborIndex index(cloud.points, radius, spec.ambient_dim());
  const auto n = static_cast<double>(cloud.size());

  ConsistencyResult out;
  out.delta = delta;
  out.lhs.resize(queries.size());
  out.rhs.resize(queries.size());
  out.residual.resize(queries.size());
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const Point& x = queries[qi];
    const double ux = fn.value(spec, x);
    double s = 0.0;
    for (std::uint32_t i : index.query(x, radius)) {
      const Point& y = cloud.points[i];
      s += kernel(squared_distance(x, y)) * (ux - fn.value(spec, y));
    }
    out.lhs[qi] = s / (n * delta * delta);
    out.rhs[qi] = quadrature_integral(
        spec,
        [&](const Point& y) {
          const double r = squared_distance(x, y) * inv4d2;
          if (profile.r_shape.compact() && r >= profile.r_shape.support) return 0.0;
          return c_delta * rbar(profile, r) * fn.laplacian(spec, y);
        },
        quadrature);
    out.residual[qi] = std::abs(out.lhs[qi] + out.rhs[qi]);
    out.max_residual = std::max(out.max_residual, out.residual[qi]);
  }
  return out;
}

ConsistencyStudy consistency_study(const PointCloud& cloud, const KernelProfile& profile,
                                   const std::vector<double>& deltas, const LabelFunction& fn,
                                   const PointList& queries, const RegionSpec& region,
                                   const QuadratureOptions& quadrature) {
  ConsistencyStudy study;
  std::vector<double> ds, rs;
  for (double d : deltas) {
    study.levels.push_back(integral_consistency(cloud, profile.with_delta(d), fn, queries, region, quadrature));
    ds.push_back(d);
    rs.push_back(study.levels.back().max_residual);
  }
  if (ds.size() >= 2 && std::all_of(rs.begin(), rs.end(), [](double r) { return r > 0.0; }))
    study.order = fit_loglog(ds, rs);
  return study;
}

}  // namespace wnll
