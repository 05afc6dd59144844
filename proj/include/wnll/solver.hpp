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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "wnll/geometry.hpp"
#include "wnll/graph.hpp"

namespace wnll {

/// The interpolation system on the unlabeled points:
///
///   sum_{y in P} R(x,y) (u(x) - u(y)) + w sum_{y in S} K(x,y) u(x) = w sum_{y in S} K(x,y) b(y)
///
/// with w = mu (WNLL) or w = 1 (graph Laplacian). Rows follow the cell-sorted
/// order of the graph's index; `point_of(row)` maps back to P. The matrix is
/// never stored: products are evaluated from the geometry. The graph must
/// outlive the system.
class LinearSystem {
 public:
  std::size_t size() const { return rows_.size(); }
  double mu() const { return mu_; }
  const AffinityGraph& graph() const { return *graph_; }

  std::uint32_t point_of(std::size_t row) const { return rows_[row]; }
  std::uint32_t row_of(std::size_t point) const { return row_of_[point]; }

  /// Right-hand side in row order.
  const std::vector<double>& rhs() const { return rhs_; }
  void set_rhs(std::vector<double> rhs);
  /// Matrix diagonal in row order.
  const std::vector<double>& diagonal() const { return diag_; }

  /// y = A x, both in row order.
  void apply(std::span<const double> x, std::span<double> y) const;

  /// Dense copy (row order), built by enumerating graph edges.
  Eigen::MatrixXd to_dense() const;

  /// Reorders a row-ordered vector into P order, and back.
  std::vector<double> to_points(std::span<const double> rows) const;
  std::vector<double> to_rows(std::span<const double> points) const;

 private:
  friend LinearSystem assemble_system(const AffinityGraph&, const LabeledSet&, double);

  const AffinityGraph* graph_ = nullptr;
  double mu_ = 0.0;
  std::vector<std::uint32_t> rows_;
  std::vector<std::uint32_t> row_of_;
  std::vector<double> rhs_;
  std::vector<double> diag_;
};

/// WNLL system with labeled weight mu.
LinearSystem assemble_wnll(const AffinityGraph& graph, const LabeledSet& labeled, double mu);
/// Graph-Laplacian baseline: labeled weight 1.
LinearSystem assemble_graph_laplacian(const AffinityGraph& graph, const LabeledSet& labeled);

/// L u(x) = sum_{y in P} R(x,y)(u(x) - u(y)) + mu sum_{y in S} K(x,y) u(x) for x in P.
/// `u_unlabeled` and `u_labeled` hold u on P and S; the S values do not enter.
std::vector<double> apply_operator(const AffinityGraph& graph, double mu, std::span<const double> u_unlabeled,
                                   std::span<const double> u_labeled);

enum class SolveMethod { kCg, kDense };
std::string to_string(SolveMethod method);
SolveMethod parse_solve_method(std::string_view name);

/// Largest system accepted by the dense method.
inline constexpr std::size_t kMaxDenseSize = 2000;

struct SolveOptions {
  SolveMethod method = SolveMethod::kCg;
  double tol = 1e-10;
  /// 0 selects 10 n.
  std::size_t max_iter = 0;
};

struct SolveStats {
  std::size_t iterations = 0;
  /// ||A u - rhs|| / ||rhs||, recomputed from the returned solution.
  double final_residual = 0.0;
  bool converged = false;
  double wall_time = 0.0;
};

struct Solution {
  /// Values on P, in P order.
  std::vector<double> values;
  SolveStats stats;
};

/// Jacobi-preconditioned conjugate gradients, or a dense LDLT factorization
/// (n <= kMaxDenseSize) that throws ConvergenceError on a singular matrix.
/// CG non-convergence is reported in the stats.
Solution solve(const LinearSystem& system, const SolveOptions& options = {});

/// n / m with n = |P|, m = |S|.
double default_mu(std::size_t unlabeled, std::size_t labeled);
double default_mu(const PointCloud& cloud, const LabeledSet& labeled);

struct ConditionReport {
  bool passed = false;
  /// P has no point within 2 delta of D; the condition holds trivially.
  bool vacuous = false;
  /// min over P in D_delta of mu d_K / d_R.
  double min_ratio = 0.0;
  /// Index in P of the minimizer, or -1.
  std::int64_t argmin = -1;
  std::size_t points_checked = 0;
};

/// Checks mu d_K(x) >= c_margin d_R(x) on every unlabeled x within geodesic
/// distance 2 delta of the region.
ConditionReport check_mu_condition(const AffinityGraph& graph, const RegionSpec& region, double delta, double mu,
                                   double c_margin = 1.0);

}  // namespace wnll
