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

#include "wnll/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "row_kernels.hpp"
#include "wnll/parallel.hpp"

namespace wnll {

AffinityGraph AffinityGraph::assemble(const PointCloud& cloud, const LabeledSet& labeled, const KernelProfile& profile) {
  if (!(profile.delta < cloud.spec.scale)) throw InvalidArgument("bandwidth delta must be below the manifold scale");
  if (profile.intrinsic_dim != cloud.spec.intrinsic_dim())
    throw InvalidArgument("kernel intrinsic dimension does not match the manifold");
  return assemble(cloud.points, labeled.points, profile, cloud.spec.ambient_dim());
}

AffinityGraph AffinityGraph::assemble(const PointList& unlabeled, const PointList& labeled,
                                      const KernelProfile& profile, int ambient_dim) {
  profile.check_delta();
  if (const auto report = validate_profile(profile); !report.passed()) {
    std::string failed;
    for (const auto& name : report.failed_clauses()) failed += " " + name;
    throw InvalidArgument("kernel profile '" + profile.id + "' is invalid:" + failed);
  }
  if (labeled.empty()) throw InvalidArgument("labeled set is empty");
  if (unlabeled.size() >= std::numeric_limits<std::uint32_t>::max() ||
      labeled.size() >= std::numeric_limits<std::uint32_t>::max())
    throw InvalidArgument("point set too large for 32-bit indices");

  AffinityGraph g;
  g.p_points_ = unlabeled;
  g.s_points_ = labeled;
  g.profile_ = profile;
  g.ambient_dim_ = ambient_dim;
  const std::size_t n = unlabeled.size();
  g.d_r_.assign(n, 0.0);
  g.d_k_.assign(n, 0.0);
  g.r_degree_.assign(n, 0);
  g.k_offsets_.assign(n + 1, 0);
  if (n == 0) return g;

  g.r_kernel_ = profile.compile(KernelKind::kR);
  g.k_kernel_ = profile.compile(KernelKind::kK);
  // Finer cells prune more of the ball's complement but lengthen the per-point cell scan.
  const double r_radius = profile.r_support_radius();
  const double cell_fraction = ambient_dim <= 2 ? 0.25 : (ambient_dim == 3 ? 0.5 : 1.0);
  g.r_index_ = std::make_shared<const NeighborIndex>(unlabeled, cell_fraction * r_radius, ambient_dim);
  g.r_blocks_ = g.r_index_->cell_blocks(r_radius);
  const NeighborIndex s_index(labeled, profile.k_support_radius(), ambient_dim);

  // R row sums and degrees from one symmetric pass in sorted order.
  const NeighborIndex& index = *g.r_index_;
  const detail::RowGeometry geo{&index, &g.r_blocks_, &g.r_kernel_, &g.p_points_, ambient_dim};
  std::vector<double> ones(n, 1.0), sums(n);
  std::vector<std::uint32_t> counts(n);
  detail::offdiag_product(geo, ones, sums, counts);
  const double self = g.r_kernel_(0.0);
  g.r_off_.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    const std::uint32_t pos = index.rank()[p];
    g.r_off_[p] = g.r_kernel_.scale * sums[pos];
    g.d_r_[p] = g.r_off_[p] + self;
    g.r_degree_[p] = counts[pos] + (self > kWeightFloor ? 1u : 0u);
  }

  std::vector<std::vector<Edge>> k_rows(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      auto& row = k_rows[p];
      for (std::uint32_t s : s_index.query(unlabeled[p], profile.k_support_radius())) {
        const double w = g.k_kernel_(squared_distance(unlabeled[p], labeled[s]));
        if (w > kWeightFloor) row.push_back({s, w});
      }
      double ksum = 0.0;
      for (const Edge& e : row) ksum += e.weight;
      g.d_k_[p] = ksum;
    }
  });

  for (std::size_t p = 0; p < n; ++p) {
    g.r_edge_count_ += g.r_degree_[p];
    g.k_offsets_[p + 1] = g.k_offsets_[p] + k_rows[p].size();
  }
  g.k_edges_.reserve(g.k_offsets_.back());
  for (auto& row : k_rows) g.k_edges_.insert(g.k_edges_.end(), row.begin(), row.end());
  return g;
}

std::span<const Edge> AffinityGraph::k_edges(std::size_t p) const {
  return std::span<const Edge>(k_edges_).subspan(k_offsets_[p], k_offsets_[p + 1] - k_offsets_[p]);
}

std::vector<Edge> AffinityGraph::r_edges(std::size_t p) const {
  std::vector<Edge> out;
  out.reserve(r_degree_[p]);
  for_each_r_edge(p, [&](std::uint32_t q, double w) { out.push_back({q, w}); });
  std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) { return a.index < b.index; });
  return out;
}

GraphStats AffinityGraph::stats(std::size_t degree_bins) const {
  GraphStats s;
  s.unlabeled = unlabeled_count();
  s.labeled = labeled_count();
  s.r_edges = r_edge_count();
  s.k_edges = k_edge_count();
  const std::size_t n = s.unlabeled;
  if (n == 0) return s;
  auto summarize = [n](const std::vector<double>& v, double& lo, double& mean, double& hi) {
    lo = *std::min_element(v.begin(), v.end());
    hi = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    mean = sum / static_cast<double>(n);
  };
  summarize(d_r_, s.d_r_min, s.d_r_mean, s.d_r_max);
  summarize(d_k_, s.d_k_min, s.d_k_mean, s.d_k_max);
  s.degree_lo = *std::min_element(r_degree_.begin(), r_degree_.end());
  s.degree_hi = *std::max_element(r_degree_.begin(), r_degree_.end());
  degree_bins = std::max<std::size_t>(degree_bins, 1);
  s.degree_histogram.assign(degree_bins, 0);
  const double width = static_cast<double>(s.degree_hi - s.degree_lo + 1) / static_cast<double>(degree_bins);
  for (auto d : r_degree_) {
    auto bin = static_cast<std::size_t>(static_cast<double>(d - s.degree_lo) / width);
    ++s.degree_histogram[std::min(bin, degree_bins - 1)];
  }
  return s;
}

ConnectivityReport check_s_connected(const AffinityGraph& graph) {
  const std::size_t n = graph.unlabeled_count();
  ConnectivityReport report;
  report.hops.assign(n, -1);
  std::deque<std::uint32_t> frontier;
  if (n == 0) {
    report.s_connected = true;
    return report;
  }
  const NeighborIndex& index = *graph.r_index();
  const auto order = index.order();
  const auto& points = graph.unlabeled_points();
  const CompiledKernel& kernel = graph.r_kernel();
  for (std::size_t p = 0; p < n; ++p) {
    if (!graph.k_edges(p).empty()) {
      report.hops[p] = 1;
      frontier.push_back(static_cast<std::uint32_t>(p));
    }
  }
  while (!frontier.empty()) {
    const std::uint32_t p = frontier.front();
    frontier.pop_front();
    const int next = report.hops[p] + 1;
    // Visited points are skipped before any kernel evaluation.
    const Point& x = points[p];
    index.for_each_block_range(x, index.cell_of_sorted(index.rank()[p]), graph.r_blocks(),
                               [&](std::uint32_t begin, std::uint32_t end) {
                                 for (std::uint32_t pos = begin; pos < end; ++pos) {
                                   const std::uint32_t q = order[pos];
                                   if (report.hops[q] >= 0) continue;
                                   if (kernel(squared_distance(x, points[q])) > kWeightFloor) {
                                     report.hops[q] = next;
                                     frontier.push_back(q);
                                   }
                                 }
                               });
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (report.hops[p] < 0)
      report.unreachable.push_back(static_cast<std::uint32_t>(p));
    else
      report.max_hops = std::max(report.max_hops, report.hops[p]);
  }
  report.s_connected = report.unreachable.empty();
  return report;
}

}  // namespace wnll
