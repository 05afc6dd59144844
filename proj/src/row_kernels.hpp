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

#include "wnll/kernels.hpp"
#include "wnll/neighbor_index.hpp"

namespace wnll::detail {

struct RowGeometry {
  const NeighborIndex* index = nullptr;
  const NeighborIndex::CellBlocks* blocks = nullptr;
  const CompiledKernel* kernel = nullptr;
  const PointList* points = nullptr;
  int dim = 0;
};

/// out[i] = sum over j != i of f(|x_i - x_j|^2) v[j], in the index's sorted
/// order, with f the kernel without its normalization constant. Each pair is
/// evaluated once. When `counts` is non-empty it receives, per row, the number
/// of j != i whose scaled weight exceeds kWeightFloor.
void offdiag_product(const RowGeometry& geo, std::span<const double> v, std::span<double> out,
                     std::span<std::uint32_t> counts = {});

}  // namespace wnll::detail
