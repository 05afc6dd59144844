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
#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wnll/types.hpp"

namespace wnll {

/// Uniform-cell grid for exact fixed-radius queries.
///
/// Points are bucketed by floor(x / cell_size) and stored in cell-sorted
/// order (cells lexicographic by integer coordinates, points ascending by
/// original index inside a cell). Queries with radius <= cell_size scan the
/// 3^d block of cells around the query's own cell.
class NeighborIndex {
 public:
  using CellKey = std::array<std::int64_t, kMaxAmbientDim>;
  /// Half-open range of sorted positions.
  using Range = std::pair<std::uint32_t, std::uint32_t>;

  NeighborIndex(const PointList& points, double cell_size, int ambient_dim);

  std::size_t size() const { return order_.size(); }
  double cell_size() const { return cell_size_; }
  int ambient_dim() const { return dim_; }
  std::size_t cell_count() const { return cell_begin_.size() - 1; }

  /// Sorted position -> original index.
  std::span<const std::uint32_t> order() const { return order_; }
  /// Original index -> sorted position.
  std::span<const std::uint32_t> rank() const { return rank_; }
  /// Coordinate c of every point, in sorted order.
  std::span<const double> sorted_coords(int c) const { return coords_[c]; }
  /// Cell id of each sorted position.
  std::uint32_t cell_of_sorted(std::uint32_t pos) const { return cell_of_[pos]; }
  /// Sorted-position ranges of the occupied cells adjacent to (and including) `cell`.
  std::span<const Range> adjacent_ranges(std::uint32_t cell) const;

  /// Sorted-position range of one cell.
  Range cell_range(std::uint32_t cell) const { return {cell_begin_[cell], cell_begin_[cell + 1]}; }

  /// For each occupied cell, the occupied cells whose boxes come within
  /// `radius` of its box, in sorted-position order.
  struct CellBlocks {
    double radius = 0.0;
    std::vector<std::uint32_t> offsets;
    std::vector<std::uint32_t> cells;

    std::span<const std::uint32_t> of(std::uint32_t cell) const {
      return std::span<const std::uint32_t>(cells).subspan(offsets[cell], offsets[cell + 1] - offsets[cell]);
    }
  };
  CellBlocks cell_blocks(double radius) const;

  /// Narrows the block of `cell` to cells whose boxes lie within the block
  /// radius of x, and calls f(begin, end) on the merged sorted-position ranges.
  template <class F>
  void for_each_block_range(const Point& x, std::uint32_t cell, const CellBlocks& blocks, F&& f) const;

  /// Original indices of all points within `radius` of x (inclusive), ascending.
  std::vector<std::uint32_t> query(const Point& x, double radius) const;

  /// Calls f(begin, end) for each occupied cell whose box may hold points within
  /// `radius` of x. Deterministic order.
  template <class F>
  void for_each_candidate_range(const Point& x, double radius, F&& f) const;

 private:
  CellKey key_of(const Point& x) const;
  std::int64_t find_cell(const CellKey& key) const;
  double box_distance2(const Point& x, const CellKey& key) const;

  struct KeyHash {
    std::size_t operator()(const CellKey& k) const noexcept;
  };

  double cell_size_;
  int dim_;
  std::vector<std::uint32_t> order_;
  std::vector<std::uint32_t> rank_;
  std::array<std::vector<double>, kMaxAmbientDim> coords_;
  std::vector<std::uint32_t> cell_of_;
  std::vector<CellKey> cell_keys_;
  std::vector<std::uint32_t> cell_begin_;
  std::unordered_map<CellKey, std::uint32_t, KeyHash> cells_;
  std::vector<Range> adjacent_;
  std::vector<std::uint32_t> adjacent_begin_;
};

template <class F>
void NeighborIndex::for_each_block_range(const Point& x, std::uint32_t cell, const CellBlocks& blocks, F&& f) const {
  const double r2 = blocks.radius * blocks.radius;
  std::uint32_t begin = 0, end = 0;
  for (std::uint32_t id : blocks.of(cell)) {
    if (box_distance2(x, cell_keys_[id]) > r2) continue;
    if (cell_begin_[id] != end) {
      if (end > begin) f(begin, end);
      begin = cell_begin_[id];
    }
    end = cell_begin_[id + 1];
  }
  if (end > begin) f(begin, end);
}

template <class F>
void NeighborIndex::for_each_candidate_range(const Point& x, double radius, F&& f) const {
  const CellKey center = key_of(x);
  const auto reach = static_cast<std::int64_t>(std::ceil(radius / cell_size_));
  const double r2 = radius * radius;
  CellKey key = center;
  // Odometer over the (2 reach + 1)^dim block.
  std::array<std::int64_t, kMaxAmbientDim> off{};
  for (int c = 0; c < dim_; ++c) off[c] = -reach;
  while (true) {
    for (int c = 0; c < dim_; ++c) key[c] = center[c] + off[c];
    if (const auto id = find_cell(key); id >= 0 && box_distance2(x, key) <= r2)
      f(cell_begin_[static_cast<std::size_t>(id)], cell_begin_[static_cast<std::size_t>(id) + 1]);
    int c = dim_ - 1;
    while (c >= 0 && off[c] == reach) off[c--] = -reach;
    if (c < 0) break;
    ++off[c];
  }
}

}  // namespace wnll
