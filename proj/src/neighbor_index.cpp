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

#include "wnll/neighbor_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wnll {

std::size_t NeighborIndex::KeyHash::operator()(const CellKey& k) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (auto v : k) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

NeighborIndex::NeighborIndex(const PointList& points, double cell_size, int ambient_dim)
    : cell_size_(cell_size), dim_(ambient_dim) {
  if (points.empty()) throw InvalidArgument("neighbor index needs at least one point");
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) throw InvalidArgument("neighbor index radius must be positive");
  if (ambient_dim < 1 || ambient_dim > kMaxAmbientDim) throw InvalidArgument("bad ambient dimension");

  const std::size_t n = points.size();
  std::vector<CellKey> keys(n);
  for (std::size_t i = 0; i < n; ++i) keys[i] = key_of(points[i]);
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  std::stable_sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) { return keys[a] < keys[b]; });

  rank_.resize(n);
  cell_of_.resize(n);
  for (int c = 0; c < kMaxAmbientDim; ++c) coords_[c].resize(n);
  for (std::uint32_t pos = 0; pos < n; ++pos) {
    const std::uint32_t i = order_[pos];
    rank_[i] = pos;
    for (int c = 0; c < kMaxAmbientDim; ++c) coords_[c][pos] = points[i][c];
    if (pos == 0 || keys[i] != keys[order_[pos - 1]]) {
      cells_.emplace(keys[i], static_cast<std::uint32_t>(cell_keys_.size()));
      cell_keys_.push_back(keys[i]);
      cell_begin_.push_back(pos);
    }
    cell_of_[pos] = static_cast<std::uint32_t>(cell_keys_.size() - 1);
  }
  cell_begin_.push_back(static_cast<std::uint32_t>(n));

  // Adjacent occupied cells (3^d block), in lexicographic order.
  adjacent_begin_.push_back(0);
  for (std::size_t cell = 0; cell < cell_keys_.size(); ++cell) {
    const CellKey& center = cell_keys_[cell];
    std::array<std::int64_t, kMaxAmbientDim> off{};
    for (int c = 0; c < dim_; ++c) off[c] = -1;
    while (true) {
      CellKey key = center;
      for (int c = 0; c < dim_; ++c) key[c] += off[c];
      if (const auto id = find_cell(key); id >= 0)
        adjacent_.emplace_back(cell_begin_[static_cast<std::size_t>(id)], cell_begin_[static_cast<std::size_t>(id) + 1]);
      int c = dim_ - 1;
      while (c >= 0 && off[c] == 1) off[c--] = -1;
      if (c < 0) break;
      ++off[c];
    }
    adjacent_begin_.push_back(static_cast<std::uint32_t>(adjacent_.size()));
  }
}

NeighborIndex::CellKey NeighborIndex::key_of(const Point& x) const {
  CellKey k{};
  for (int c = 0; c < dim_; ++c) k[c] = static_cast<std::int64_t>(std::floor(x[c] / cell_size_));
  return k;
}

std::int64_t NeighborIndex::find_cell(const CellKey& key) const {
  const auto it = cells_.find(key);
  return it == cells_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

double NeighborIndex::box_distance2(const Point& x, const CellKey& key) const {
  double d2 = 0.0;
  for (int c = 0; c < dim_; ++c) {
    const double lo = static_cast<double>(key[c]) * cell_size_;
    const double hi = lo + cell_size_;
    const double gap = x[c] < lo ? lo - x[c] : (x[c] > hi ? x[c] - hi : 0.0);
    d2 += gap * gap;
  }
  return d2;
}

std::span<const NeighborIndex::Range> NeighborIndex::adjacent_ranges(std::uint32_t cell) const {
  return std::span<const Range>(adjacent_).subspan(adjacent_begin_[cell], adjacent_begin_[cell + 1] - adjacent_begin_[cell]);
}

NeighborIndex::CellBlocks NeighborIndex::cell_blocks(double radius) const {
  if (!(radius > 0.0)) throw InvalidArgument("block radius must be positive");
  const auto reach = static_cast<std::int64_t>(std::ceil(radius / cell_size_));
  const double r2 = radius * radius;
  CellBlocks blocks;
  blocks.radius = radius;
  blocks.offsets.push_back(0);
  std::vector<std::uint32_t> found;
  for (std::size_t cell = 0; cell < cell_keys_.size(); ++cell) {
    const CellKey& center = cell_keys_[cell];
    found.clear();
    std::array<std::int64_t, kMaxAmbientDim> off{};
    for (int c = 0; c < dim_; ++c) off[c] = -reach;
    while (true) {
      double gap2 = 0.0;
      CellKey key = center;
      for (int c = 0; c < dim_; ++c) {
        key[c] += off[c];
        const double gap = static_cast<double>(std::max<std::int64_t>(std::abs(off[c]) - 1, 0)) * cell_size_;
        gap2 += gap * gap;
      }
      if (gap2 <= r2) {
        if (const auto id = find_cell(key); id >= 0) found.push_back(static_cast<std::uint32_t>(id));
      }
      int c = dim_ - 1;
      while (c >= 0 && off[c] == reach) off[c--] = -reach;
      if (c < 0) break;
      ++off[c];
    }
    // Cell ids follow sorted-position order.
    std::sort(found.begin(), found.end());
    blocks.cells.insert(blocks.cells.end(), found.begin(), found.end());
    blocks.offsets.push_back(static_cast<std::uint32_t>(blocks.cells.size()));
  }
  return blocks;
}

std::vector<std::uint32_t> NeighborIndex::query(const Point& x, double radius) const {
  std::vector<std::uint32_t> out;
  const double r2 = radius * radius;
  for_each_candidate_range(x, radius, [&](std::uint32_t begin, std::uint32_t end) {
    for (std::uint32_t pos = begin; pos < end; ++pos) {
      double d2 = 0.0;
      for (int c = 0; c < kMaxAmbientDim; ++c) {
        const double t = x[c] - coords_[c][pos];
        d2 += t * t;
      }
      if (d2 <= r2) out.push_back(order_[pos]);
    }
  });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace wnll
