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

// O(n^2) and closed-form oracles shared by the unit and acceptance tests.
// Nothing here calls into the neighbor index or the symmetric products.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "wnll/graph.hpp"
#include "wnll/kernels.hpp"

namespace oracle {

using wnll::Edge;
using wnll::Point;
using wnll::PointList;

/// Every pair (i, j) with positive weight, rows over `from`, ascending j over `to`.
inline std::vector<std::vector<Edge>> brute_edges(const PointList& from, const PointList& to,
                                                  const wnll::CompiledKernel& kernel) {
  std::vector<std::vector<Edge>> out(from.size());
  for (std::size_t i = 0; i < from.size(); ++i)
    for (std::size_t j = 0; j < to.size(); ++j) {
      const double w = kernel(wnll::squared_distance(from[i], to[j]));
      if (w > wnll::kWeightFloor) out[i].push_back({static_cast<std::uint32_t>(j), w});
    }
  return out;
}

/// Dense WNLL matrix and right-hand side in P order, from the defining sums.
struct DenseSystem {
  Eigen::MatrixXd a;
  Eigen::VectorXd rhs;
};

inline DenseSystem brute_system(const PointList& p, const PointList& s, const std::vector<double>& b,
                                const wnll::KernelProfile& profile, double mu) {
  const auto n = static_cast<Eigen::Index>(p.size());
  DenseSystem sys{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point& x = p[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double w = profile.eval_scaled(wnll::KernelKind::kR, x, p[static_cast<std::size_t>(j)]);
      sys.a(i, j) -= w;
      sys.a(i, i) += w;
    }
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double w = profile.eval_scaled(wnll::KernelKind::kK, x, s[k]);
      sys.a(i, i) += mu * w;
      sys.rhs(i) += mu * w * b[k];
    }
  }
  return sys;
}

/// Components of the graph P u S reachable from S, by repeated relaxation.
inline std::vector<bool> brute_reachable(const PointList& p, const PointList& s, const wnll::KernelProfile& profile) {
  std::vector<bool> reached(p.size(), false);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (const Point& y : s)
      if (profile.eval_scaled(wnll::KernelKind::kK, p[i], y) > wnll::kWeightFloor) reached[i] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (reached[i]) continue;
      for (std::size_t j = 0; j < p.size(); ++j)
        if (reached[j] && profile.eval_scaled(wnll::KernelKind::kR, p[i], p[j]) > wnll::kWeightFloor) {
          reached[i] = changed = true;
          break;
        }
    }
  }
  return reached;
}

/// Slope of least squares on (log x, log y), written out directly.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace oracle
