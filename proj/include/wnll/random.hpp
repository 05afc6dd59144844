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

namespace wnll {

// Counter-based uniform generator: every draw is a pure function of
// (seed, stream, index, lane), so point i of a cloud never depends on how
// many points were generated before it or on which worker generated it.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index,
                              std::uint32_t lane) {
  const std::uint64_t h = mix64(seed ^ mix64(stream ^ mix64(index * 16 + lane)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Stream ids keep the cloud, the labels and auxiliary draws independent under one seed.
enum class Stream : std::uint64_t {
  kCloud = 0x636c6f7564ULL,
  kLabels = 0x6c6162656cULL,
  kAux = 0x617578ULL,
};

}  // namespace wnll
