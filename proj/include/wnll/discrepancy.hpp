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

#include <cstdint>
#include <functional>
#include <vector>

#include "wnll/fit.hpp"
#include "wnll/geometry.hpp"
#include "wnll/kernels.hpp"

namespace wnll {

using Integrand = std::function<double(const Point&)>;

struct QuadratureOptions {
  /// Points per intrinsic direction at the first level; at least 64.
  std::size_t resolution = 64;
  /// Stop once successive doublings differ by at most tol * max(1, |value|).
  double tol = 1e-10;
  /// 0 picks 2^20 on the circle and 4096 per direction on surfaces.
  std::size_t max_resolution = 0;
};

/// (1/|M|) times the integral of f over M. Circle and torus: periodic
/// trapezoid rule in the angles. Sphere: composite 4-point Gauss-Legendre in
/// z times the trapezoid rule in longitude. Resolution doubles until the
/// change is below tolerance; ConvergenceError at max_resolution.
double quadrature_integral(const ManifoldSpec& spec, const Integrand& f, const QuadratureOptions& options = {});

/// The same rule at one fixed resolution.
double quadrature_at_resolution(const ManifoldSpec& spec, const Integrand& f, std::size_t resolution);

/// Deterministic center grid: per_dim equispaced angles on the circle,
/// per_dim x per_dim (colatitude midpoints x longitude) on the sphere, and
/// per_dim x per_dim angles on the torus.
PointList discrepancy_centers(const ManifoldSpec& spec, std::size_t per_dim = 512);

struct DiscrepancyResult {
  double sup_gap = 0.0;
  Point argmax_center{};
  std::size_t n = 0;
  double delta = 0.0;
  std::size_t center_count = 0;
  /// Population mean I(R_delta(x, .)), the same for every center.
  double population = 0.0;
};

/// max over centers x of |I(R_delta(x,.)) - (1/n) sum_{y in P} R_delta(x,y)|.
/// All three manifolds are homogeneous, so I is evaluated once by quadrature
/// about the first center.
DiscrepancyResult empirical_discrepancy(const ManifoldSpec& spec, const PointCloud& cloud,
                                        const KernelProfile& profile, const PointList& centers);

/// c delta^(-k) n^(-1/2) (ln n - 2 ln delta + 1)^(1/2), for n >= 2 and delta in (0, 1).
double theoretical_bound(double n, double delta, int k, double c);

struct DiscrepancyRow {
  std::size_t n = 0;
  double delta = 0.0;
  /// Median over seeds.
  double sup_gap = 0.0;
  double bound = 0.0;
  double ratio = 0.0;  // sup_gap / bound
  std::vector<double> per_seed;
};

struct DiscrepancyStudy {
  std::vector<DiscrepancyRow> rows;
  /// Constant making the bound equal the median sup_gap at the smallest n.
  double c_star = 0.0;
  /// Fit of log sup_gap against log n.
  LineFit exponent;
  /// Every row past the first satisfies bound >= sup_gap.
  bool bound_dominates = false;
};

/// Discrepancy over an n ladder at fixed profile bandwidth, with independent
/// clouds per seed.
DiscrepancyStudy discrepancy_study(const ManifoldSpec& spec, const KernelProfile& profile,
                                   const std::vector<std::size_t>& n_ladder, const std::vector<std::uint64_t>& seeds,
                                   SamplingMode mode, std::size_t centers_per_dim = 512);

struct ConsistencyResult {
  double delta = 0.0;
  /// (1/(n delta^2)) sum_y R_delta(x,y) (u(x) - u(y)) per query.
  std::vector<double> lhs;
  /// (1/|M|) integral of Rbar_delta(x,y) Lap u(y) dy per query.
  std::vector<double> rhs;
  std::vector<double> residual;
  double max_residual = 0.0;
};

/// Interior integral identity at each query. Queries must lie farther than
/// 2 delta (geodesic) from the region; the label function needs a Laplacian.
ConsistencyResult integral_consistency(const PointCloud& cloud, const KernelProfile& profile,
                                       const LabelFunction& fn, const PointList& queries, const RegionSpec& region,
                                       const QuadratureOptions& quadrature = {});

struct ConsistencyStudy {
  std::vector<ConsistencyResult> levels;
  /// Fit of log max_residual against log delta.
  LineFit order;
};

ConsistencyStudy consistency_study(const PointCloud& cloud, const KernelProfile& profile,
                                   const std::vector<double>& deltas, const LabelFunction& fn,
                                   const PointList& queries, const RegionSpec& region,
                                   const QuadratureOptions& quadrature = {});

double median(std::vector<double> values);

}  // namespace wnll
