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
#include <memory>
#include <span>
#include <vector>

#include "wnll/geometry.hpp"
#include "wnll/kernels.hpp"
#include "wnll/neighbor_index.hpp"

namespace wnll {

struct Edge {
  std::uint32_t index = 0;
  double weight = 0.0;

  bool operator==(const Edge&) const = default;
};

/// Weights below this are treated as zero and never stored.
inline constexpr double kWeightFloor = 1e-300;

struct GraphStats {
  std::size_t unlabeled = 0;
  std::size_t labeled = 0;
  std::size_t r_edges = 0;  // P-P pairs with R > 0, self pairs included
  std::size_t k_edges = 0;  // P-S pairs with K > 0
  double d_r_min = 0.0, d_r_mean = 0.0, d_r_max = 0.0;
  double d_k_min = 0.0, d_k_mean = 0.0, d_k_max = 0.0;
  /// Histogram of per-point R-neighbor counts: `degree_bins` equal-width bins
  /// over [degree_lo, degree_hi].
  std::size_t degree_lo = 0, degree_hi = 0;
  std::vector<std::size_t> degree_histogram;
};

/// Sparse kernel affinities between the unlabeled cloud P and the labeled set S.
///
/// R-weights couple P with P (self pairs included), K-weights couple P with
/// S. K edges are stored; R edges are enumerated on demand from the neighbor
/// index because at useful bandwidths they far outnumber the points. The graph
/// is immutable after assembly.
class AffinityGraph {
 public:
  static AffinityGraph assemble(const PointCloud& cloud, const LabeledSet& labeled, const KernelProfile& profile);
  /// Same, for raw point lists (e.g. loaded from CSV). `ambient_dim` bounds the index.
  static AffinityGraph assemble(const PointList& unlabeled, const PointList& labeled, const KernelProfile& profile,
                                int ambient_dim);

  std::size_t unlabeled_count() const { return p_points_.size(); }
  std::size_t labeled_count() const { return s_points_.size(); }
  const PointList& unlabeled_points() const { return p_points_; }
  const PointList& labeled_points() const { return s_points_; }
  const KernelProfile& profile() const { return profile_; }
  int ambient_dim() const { return ambient_dim_; }

  /// d_R(x) = sum over y in P of R_delta(x, y).
  std::span<const double> d_r() const { return d_r_; }
  /// d_R(x) - R_delta(x, x): the R row sum without the self pair.
  std::span<const double> r_offdiag_sums() const { return r_off_; }
  /// d_K(x) = sum over y in S of K_delta(x, y).
  std::span<const double> d_k() const { return d_k_; }

  /// K edges of unlabeled point p, ascending by labeled index.
  std::span<const Edge> k_edges(std::size_t p) const;
  /// R edges of unlabeled point p (self included), ascending by index.
  std::vector<Edge> r_edges(std::size_t p) const;
  /// Calls f(q, weight) for every R edge of p in index traversal order.
  template <class F>
  void for_each_r_edge(std::size_t p, F&& f) const;

  std::size_t r_edge_count() const { return r_edge_count_; }
  std::size_t k_edge_count() const { return k_offsets_.empty() ? 0 : k_offsets_.back(); }
  std::span<const std::uint32_t> r_degree() const { return r_degree_; }

  /// Index over P used for R edges. Null when P is empty.
  const std::shared_ptr<const NeighborIndex>& r_index() const { return r_index_; }
  /// Candidate ranges per cell of r_index() covering the R support radius.
  const NeighborIndex::CellBlocks& r_blocks() const { return r_blocks_; }
  const CompiledKernel& r_kernel() const { return r_kernel_; }

  GraphStats stats(std::size_t degree_bins = 10) const;

 private:
  AffinityGraph() = default;

  PointList p_points_;
  PointList s_points_;
  KernelProfile profile_;
  int ambient_dim_ = 0;
  std::shared_ptr<const NeighborIndex> r_index_;
  NeighborIndex::CellBlocks r_blocks_;
  CompiledKernel r_kernel_;
  CompiledKernel k_kernel_;
  std::vector<double> d_r_;
  std::vector<double> r_off_;
  std::vector<double> d_k_;
  std::vector<std::uint32_t> r_degree_;
  std::size_t r_edge_count_ = 0;
  std::vector<std::size_t> k_offsets_;
  std::vector<Edge> k_edges_;
};

template <class F>
void AffinityGraph::for_each_r_edge(std::size_t p, F&& f) const {
  const NeighborIndex& index = *r_index_;
  const Point& x = p_points_[p];
  const auto order = index.order();
  const std::uint32_t cell = index.cell_of_sorted(index.rank()[p]);
  index.for_each_block_range(x, cell, r_blocks_, [&](std::uint32_t begin, std::uint32_t end) {
    for (std::uint32_t pos = begin; pos < end; ++pos) {
      const std::uint32_t q = order[pos];
      const double w = r_kernel_(squared_distance(x, p_points_[q]));
      if (w > kWeightFloor) f(q, w);
    }
  });
}

struct ConnectivityReport {
  bool s_connected = false;
  /// Unlabeled points with no path to S, ascending.
  std::vector<std::uint32_t> unreachable;
  /// Hop count from S for each unlabeled point (1 = direct K neighbor), -1 if unreachable.
  std::vector<int> hops;
  int max_hops = 0;
};

/// Breadth-first search seeded at every labeled point over the neighbor
/// relation: P-P pairs with R > 0, P-S pairs with K > 0.
ConnectivityReport check_s_connected(const AffinityGraph& graph);

}  // namespace wnll
