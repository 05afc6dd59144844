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
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace wnll {

/// Largest ambient dimension of any supported manifold (Clifford torus in R^4).
inline constexpr int kMaxAmbientDim = 4;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Ambient coordinates. Components past the manifold's ambient dimension are
/// kept at exactly zero so distance computations can always run over all four.
using Point = std::array<double, kMaxAmbientDim>;

using PointList = std::vector<Point>;

inline double squared_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (int c = 0; c < kMaxAmbientDim; ++c) {
    const double t = a[c] - b[c];
    s += t * t;
  }
  return s;
}

inline double norm(const Point& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument, violated precondition, or unknown registry id.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure (oracle, quadrature) failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Carries the offending 1-based line (0 if unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace wnll
