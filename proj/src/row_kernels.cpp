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

#include "row_kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "wnll/graph.hpp"
#include "wnll/parallel.hpp"

namespace wnll::detail {
namespace {

struct Accumulators {
  double* out;
  std::uint32_t* counts;  // null when not counting
};

// Upper-triangle pass over rows [row_begin, row_end): row i meets every j > i
// in its candidate ranges and adds to both out[i] and out[j].
template <int Dim, int P, int Q, bool Count>
void upper_rows(const RowGeometry& geo, std::uint32_t cell_begin, std::uint32_t cell_end, const double* v,
                Accumulators acc) {
  const NeighborIndex& index = *geo.index;
  std::array<const double*, Dim> col;
  for (int c = 0; c < Dim; ++c) col[c] = index.sorted_coords(c).data();
  const CompiledKernel& k = *geo.kernel;
  const double t_per_d2 = k.t_per_d2;
  std::array<double, Q> q;
  for (int i = 0; i < Q; ++i) q[i] = k.q[static_cast<std::size_t>(i)];
  const double f_floor = kWeightFloor / k.scale;
  const auto order = index.order();
  double* out = acc.out;
  std::uint32_t* counts = acc.counts;

  for (std::uint32_t cell = cell_begin; cell < cell_end; ++cell) {
    const auto [row_begin, row_end] = index.cell_range(cell);
    for (std::uint32_t i = row_begin; i < row_end; ++i) {
      std::array<double, Dim> xi;
      for (int c = 0; c < Dim; ++c) xi[c] = col[c][i];
      const double vi = v[i];
      double sum = 0.0;
      std::uint32_t cnt = 0;
      index.for_each_block_range((*geo.points)[order[i]], cell, *geo.blocks, [&](std::uint32_t b, std::uint32_t e) {
        b = std::max(b, i + 1);
        if (b >= e) return;
#pragma omp simd reduction(+ : sum, cnt)
        for (std::uint32_t j = b; j < e; ++j) {
          double d2 = 0.0;
          for (int c = 0; c < Dim; ++c) {
            const double t = xi[c] - col[c][j];
            d2 += t * t;
          }
          double t = d2 * t_per_d2;
          t = t < 1.0 ? t : 1.0;
          const double s = 1.0 - t;
          double e_pow = 1.0;
          for (int p = 0; p < P; ++p) e_pow *= s;
          double qv = q[Q - 1];
          for (int p = Q - 2; p >= 0; --p) qv = qv * t + q[p];
          const double f = e_pow * qv;
          sum += f * v[j];
          out[j] += f * vi;
          if constexpr (Count) {
            const std::uint32_t hit = f > f_floor ? 1u : 0u;
            cnt += hit;
            counts[j] += hit;
          }
        }
      });
      out[i] += sum;
      if constexpr (Count) counts[i] += cnt;
    }
  }
}

template <int Dim, bool Count>
void upper_rows_generic(const RowGeometry& geo, std::uint32_t cell_begin, std::uint32_t cell_end, const double* v,
                        Accumulators acc) {
  const NeighborIndex& index = *geo.index;
  CompiledKernel unit = *geo.kernel;
  const double f_floor = kWeightFloor / unit.scale;
  unit.scale = 1.0;
  const auto order = index.order();
  for (std::uint32_t cell = cell_begin; cell < cell_end; ++cell) {
    const auto [row_begin, row_end] = index.cell_range(cell);
    for (std::uint32_t i = row_begin; i < row_end; ++i) {
      std::array<double, Dim> xi;
      for (int c = 0; c < Dim; ++c) xi[c] = index.sorted_coords(c)[i];
      index.for_each_block_range((*geo.points)[order[i]], cell, *geo.blocks, [&](std::uint32_t b, std::uint32_t e) {
        for (std::uint32_t j = std::max(b, i + 1); j < e; ++j) {
          double d2 = 0.0;
          for (int c = 0; c < Dim; ++c) {
            const double t = xi[c] - index.sorted_coords(c)[j];
            d2 += t * t;
          }
          const double f = unit(d2);
          acc.out[i] += f * v[j];
          acc.out[j] += f * v[i];
          if constexpr (Count) {
            if (f > f_floor) {
              ++acc.counts[i];
              ++acc.counts[j];
            }
          }
        }
      });
    }
  }
}

using UpperRows = void (*)(const RowGeometry&, std::uint32_t, std::uint32_t, const double*, Accumulators);

template <int Dim, bool Count>
UpperRows pick_for_dim(const CompiledKernel& k) {
  if (!k.gaussian && k.edge_power == 4 && k.q_size == 2) return &upper_rows<Dim, 4, 2, Count>;
  if (!k.gaussian && k.edge_power == 1 && k.q_size == 1) return &upper_rows<Dim, 1, 1, Count>;
  if (!k.gaussian && k.edge_power == 2 && k.q_size == 1) return &upper_rows<Dim, 2, 1, Count>;
  return &upper_rows_generic<Dim, Count>;
}

template <bool Count>
UpperRows pick(int dim, const CompiledKernel& k) {
  switch (dim) {
    case 1: return pick_for_dim<1, Count>(k);
    case 2: return pick_for_dim<2, Count>(k);
    case 3: return pick_for_dim<3, Count>(k);
    default: return pick_for_dim<4, Count>(k);
  }
}

}  // namespace

void offdiag_product(const RowGeometry& geo, std::span<const double> v, std::span<double> out,
                     std::span<std::uint32_t> counts) {
  const std::size_t n = geo.index->size();
  const bool count = !counts.empty();
  const UpperRows rows = count ? pick<true>(geo.dim, *geo.kernel) : pick<false>(geo.dim, *geo.kernel);
  const auto cells = static_cast<std::uint32_t>(geo.index->cell_count());
  // Fixed task split; partial sums are combined in task order.
  const std::size_t tasks = std::clamp<std::size_t>(static_cast<std::size_t>(worker_count()), 1, std::max<std::size_t>(n / 2048, 1));
  std::fill(out.begin(), out.end(), 0.0);
  if (count) std::fill(counts.begin(), counts.end(), 0u);
  if (tasks == 1) {
    rows(geo, 0, cells, v.data(), {out.data(), count ? counts.data() : nullptr});
    return;
  }
  std::vector<std::vector<double>> partial(tasks, std::vector<double>(n, 0.0));
  std::vector<std::vector<std::uint32_t>> partial_counts(count ? tasks : 0, std::vector<std::uint32_t>(n, 0u));
  // Upper-triangle work shrinks toward the last rows, so cut by row count weighted toward the end.
  std::vector<std::uint32_t> cut(tasks + 1, cells);
  cut[0] = 0;
  for (std::size_t t = 1; t < tasks; ++t) {
    const double frac = 1.0 - std::sqrt(1.0 - static_cast<double>(t) / static_cast<double>(tasks));
    cut[t] = static_cast<std::uint32_t>(frac * cells);
  }
  parallel_tasks(tasks, [&](std::size_t t) {
    rows(geo, cut[t], cut[t + 1], v.data(), {partial[t].data(), count ? partial_counts[t].data() : nullptr});
  });
  for (std::size_t t = 0; t < tasks; ++t) {
    for (std::size_t i = 0; i < n; ++i) out[i] += partial[t][i];
    if (count)
      for (std::size_t i = 0; i < n; ++i) counts[i] += partial_counts[t][i];
  }
}

}  // namespace wnll::detail
