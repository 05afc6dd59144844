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

#include "wnll/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "row_kernels.hpp"
#include "wnll/parallel.hpp"

namespace wnll {
namespace {

// y[row] = diag[row] x[row] - sum_{j != row} R_{row j} x[j], all in sorted order.
void sorted_product(const AffinityGraph& graph, std::span<const double> diag, std::span<const double> x,
                    std::span<double> y) {
  const detail::RowGeometry geo{graph.r_index().get(), &graph.r_blocks(), &graph.r_kernel(),
                                &graph.unlabeled_points(), graph.ambient_dim()};
  detail::offdiag_product(geo, x, y);
  const double scale = graph.r_kernel().scale;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = diag[i] * x[i] - scale * y[i];
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

LinearSystem assemble_system(const AffinityGraph& graph, const LabeledSet& labeled, double weight) {
  if (!(weight > 0.0) || !std::isfinite(weight)) throw InvalidArgument("mu must be positive");
  if (labeled.size() == 0) throw InvalidArgument("labeled set is empty");
  if (labeled.size() != graph.labeled_count() || labeled.values.size() != labeled.size())
    throw InvalidArgument("labeled set does not match the graph");

  LinearSystem sys;
  sys.graph_ = &graph;
  sys.mu_ = weight;
  const std::size_t n = graph.unlabeled_count();
  if (n == 0) return sys;
  const NeighborIndex& index = *graph.r_index();
  sys.rows_.assign(index.order().begin(), index.order().end());
  sys.row_of_.assign(index.rank().begin(), index.rank().end());

  const auto d_k = graph.d_k();
  const auto off = graph.r_offdiag_sums();
  sys.rhs_.assign(n, 0.0);
  sys.diag_.resize(n);
  for (std::size_t row = 0; row < n; ++row) {
    const std::uint32_t p = sys.rows_[row];
    sys.diag_[row] = off[p] + weight * d_k[p];
    double b = 0.0;
    for (const Edge& e : graph.k_edges(p)) b += e.weight * labeled.values[e.index];
    sys.rhs_[row] = weight * b;
  }
  return sys;
}

LinearSystem assemble_wnll(const AffinityGraph& graph, const LabeledSet& labeled, double mu) {
  return assemble_system(graph, labeled, mu);
}

LinearSystem assemble_graph_laplacian(const AffinityGraph& graph, const LabeledSet& labeled) {
  return assemble_system(graph, labeled, 1.0);
}

void LinearSystem::set_rhs(std::vector<double> rhs) {
  if (rhs.size() != size()) throw InvalidArgument("right-hand side has the wrong length");
  rhs_ = std::move(rhs);
}

void LinearSystem::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != size() || y.size() != size()) throw InvalidArgument("vector length does not match the system");
  if (size() == 0) return;
  sorted_product(*graph_, diag_, x, y);
}

Eigen::MatrixXd LinearSystem::to_dense() const {
  const std::size_t n = size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const auto d_k = graph_->d_k();
  for (std::size_t row = 0; row < n; ++row) {
    const std::uint32_t p = rows_[row];
    const auto i = static_cast<Eigen::Index>(row);
    double off = 0.0;
    for (const Edge& e : graph_->r_edges(p)) {
      if (e.index == p) continue;
      a(i, static_cast<Eigen::Index>(row_of_[e.index])) = -e.weight;
      off += e.weight;
    }
    a(i, i) = off + mu_ * d_k[p];
  }
  return a;
}

std::vector<double> LinearSystem::to_points(std::span<const double> rows) const {
  if (rows.size() != size()) throw InvalidArgument("vector length does not match the system");
  std::vector<double> out(size());
  for (std::size_t row = 0; row < size(); ++row) out[rows_[row]] = rows[row];
  return out;
}

std::vector<double> LinearSystem::to_rows(std::span<const double> points) const {
  if (points.size() != size()) throw InvalidArgument("vector length does not match the system");
  std::vector<double> out(size());
  for (std::size_t row = 0; row < size(); ++row) out[row] = points[rows_[row]];
  return out;
}

std::vector<double> apply_operator(const AffinityGraph& graph, double mu, std::span<const double> u_unlabeled,
                                   std::span<const double> u_labeled) {
  const std::size_t n = graph.unlabeled_count();
  if (u_unlabeled.size() != n || u_labeled.size() != graph.labeled_count())
    throw InvalidArgument("value map does not match the point sets");
  std::vector<double> out(n, 0.0);
  const auto d_k = graph.d_k();
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const double up = u_unlabeled[p];
      double s = 0.0;
      graph.for_each_r_edge(p, [&](std::uint32_t q, double w) { s += w * (up - u_unlabeled[q]); });
      out[p] = s + mu * d_k[p] * up;
    }
  });
  return out;
}

std::string to_string(SolveMethod method) { return method == SolveMethod::kCg ? "cg" : "dense"; }

SolveMethod parse_solve_method(std::string_view name) {
  if (name == "cg") return SolveMethod::kCg;
  if (name == "dense") return SolveMethod::kDense;
  throw InvalidArgument("unknown solver method '" + std::string(name) + "'");
}

namespace {

double residual_norm(const LinearSystem& sys, std::span<const double> x, std::vector<double>& r) {
  sys.apply(x, r);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = sys.rhs()[i] - r[i];
    s += r[i] * r[i];
  }
  return std::sqrt(s);
}

void solve_cg(const LinearSystem& sys, const SolveOptions& opt, std::vector<double>& x, SolveStats& stats) {
  const std::size_t n = sys.size();
  const std::size_t max_iter = opt.max_iter > 0 ? opt.max_iter : 10 * n;
  const auto& b = sys.rhs();
  const double b_norm = std::sqrt(dot(b, b));
  const auto& diag = sys.diagonal();
  std::vector<double> r(n), z(n), p(n), ap(n);
  double res = residual_norm(sys, x, r) / b_norm;
  // Restart from the true residual when the recurrence drifts below tol.
  for (int restart = 0; restart < 5 && res > opt.tol && stats.iterations < max_iter; ++restart) {
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    p = z;
    double rz = dot(r, z);
    while (stats.iterations < max_iter) {
      sys.apply(p, ap);
      const double pap = dot(p, ap);
      if (!(pap > 0.0)) break;
      const double alpha = rz / pap;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
      ++stats.iterations;
      if (std::sqrt(dot(r, r)) / b_norm <= opt.tol) break;
      for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
      const double rz_next = dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    res = residual_norm(sys, x, r) / b_norm;
    if (!std::isfinite(res)) break;
  }
  stats.final_residual = res;
  stats.converged = res <= opt.tol;
}

void solve_dense(const LinearSystem& sys, std::vector<double>& x, SolveStats& stats) {
  const std::size_t n = sys.size();
  if (n > kMaxDenseSize) throw InvalidArgument("dense solver is limited to " + std::to_string(kMaxDenseSize) + " unknowns");
  const Eigen::MatrixXd a = sys.to_dense();
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
  if (ldlt.info() != Eigen::Success || d.minCoeff() <= 1e-13 * d.maxCoeff())
    throw ConvergenceError("dense factorization is singular");
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(sys.rhs().data(), static_cast<Eigen::Index>(n));
  const Eigen::VectorXd sol = ldlt.solve(rhs);
  x.assign(sol.data(), sol.data() + n);
  stats.iterations = 1;
}

}  // namespace

Solution solve(const LinearSystem& system, const SolveOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = system.size();
  Solution out;
  std::vector<double> x(n, 0.0);
  const double b_norm = std::sqrt(dot(system.rhs(), system.rhs()));
  if (n == 0 || b_norm == 0.0) {
    out.values.assign(n, 0.0);
    out.stats.converged = true;
    out.stats.wall_time = seconds_since(start);
    return out;
  }
  if (options.method == SolveMethod::kCg) {
    solve_cg(system, options, x, out.stats);
  } else {
    solve_dense(system, x, out.stats);
    std::vector<double> r(n);
    out.stats.final_residual = residual_norm(system, x, r) / b_norm;
    out.stats.converged = true;
  }
  out.values = system.to_points(x);
  out.stats.wall_time = seconds_since(start);
  return out;
}

double default_mu(std::size_t unlabeled, std::size_t labeled) {
  if (labeled == 0) throw InvalidArgument("default mu needs at least one labeled point");
  return static_cast<double>(unlabeled) / static_cast<double>(labeled);
}

double default_mu(const PointCloud& cloud, const LabeledSet& labeled) {
  return default_mu(cloud.size(), labeled.size());
}

ConditionReport check_mu_condition(const AffinityGraph& graph, const RegionSpec& region, double delta, double mu,
                                   double c_margin) {
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  ConditionReport report;
  report.min_ratio = std::numeric_limits<double>::infinity();
  const auto d_r = graph.d_r();
  const auto d_k = graph.d_k();
  const auto& points = graph.unlabeled_points();
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (geodesic_distance_to_region(region, points[p]) > 2.0 * delta) continue;
    ++report.points_checked;
    const double ratio = mu * d_k[p] / d_r[p];
    if (ratio < report.min_ratio) {
      report.min_ratio = ratio;
      report.argmin = static_cast<std::int64_t>(p);
    }
  }
  report.vacuous = report.points_checked == 0;
  if (report.vacuous) report.min_ratio = 0.0;
  report.passed = report.vacuous || report.min_ratio >= c_margin;
  return report;
}

}  // namespace wnll
