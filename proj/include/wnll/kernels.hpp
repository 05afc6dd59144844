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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wnll/types.hpp"

namespace wnll {

enum class ProfileFamily { kCompactPolynomial, kGaussian };

/// Radial profile f(r) of the squared, bandwidth-scaled distance
/// r = |x - y|^2 / (4 delta^2).
///
/// Compact polynomial profiles are stored in factored form
///   f(r) = (1 - r / support)^edge_power * q(r / support)   for r <= support,
/// zero beyond, so values stay accurate right up to the support edge.
struct RadialProfile {
  ProfileFamily family = ProfileFamily::kCompactPolynomial;
  double support = 1.0;
  int edge_power = 4;
  std::vector<double> q{1.0, 4.0};  // ascending coefficients in t = r / support

  /// (1 - t)^4 (1 + 4t), t = r / support: C^2 at the edge, closed-form tail.
  static RadialProfile wendland(double support = 1.0) { return {ProfileFamily::kCompactPolynomial, support, 4, {1.0, 4.0}}; }
  static RadialProfile gaussian() { return {ProfileFamily::kGaussian, 0.0, 0, {}}; }

  bool compact() const { return family == ProfileFamily::kCompactPolynomial; }
  bool is_wendland() const { return compact() && edge_power == 4 && q == std::vector<double>{1.0, 4.0}; }

  double value(double r) const;
  /// Expanded monomial coefficients in r (compact polynomials only).
  std::vector<double> monomials() const;
  /// Integral of f over [r, inf) when a closed form is registered.
  std::optional<double> tail_closed_form(double r) const;

  bool operator==(const RadialProfile&) const = default;
};

enum class KernelKind { kR, kK };

/// A radial profile bound to a bandwidth, ready for evaluation on squared
/// distances. Every weight in the library goes through operator().
struct CompiledKernel {
  static constexpr int kMaxCoefficients = 8;

  bool gaussian = false;
  double scale = 1.0;       // C_delta
  double t_per_d2 = 1.0;    // 1 / (4 delta^2 support)
  double r_per_d2 = 1.0;    // 1 / (4 delta^2)
  int edge_power = 0;
  int q_size = 0;
  std::array<double, kMaxCoefficients> q{};

  double operator()(double dist2) const {
    if (gaussian) return scale * std::exp(-dist2 * r_per_d2);
    const double t = dist2 * t_per_d2;
    if (t >= 1.0) return 0.0;
    const double s = 1.0 - t;
    double e = 1.0;
    for (int k = 0; k < edge_power; ++k) e *= s;
    double qv = 0.0;
    for (int k = q_size - 1; k >= 0; --k) qv = qv * t + q[static_cast<std::size_t>(k)];
    return scale * (e * qv);
  }
};

/// The kernel pair (R, K) at bandwidth delta on a k-dimensional manifold.
///
/// Scaled kernels: R_delta(x, y) = C_delta R(|x - y|^2 / (4 delta^2)) with
/// C_delta = (4 pi delta^2)^(-k/2), and likewise for K. R vanishes beyond
/// |x - y| = 2 delta, K beyond 2 delta sqrt(r0).
struct KernelProfile {
  std::string id = "wendland_c2_default";
  RadialProfile r_shape = RadialProfile::wendland(1.0);
  RadialProfile k_shape = RadialProfile::wendland(3.0);
  double delta = 0.1;
  int intrinsic_dim = 1;
  double r0 = 3.0;
  double delta0_r = 0.1875;
  double delta0_k = 0.045;

  double normalization() const;
  double r_support_radius() const;
  double k_support_radius() const;
  double support_radius(KernelKind kind) const { return kind == KernelKind::kR ? r_support_radius() : k_support_radius(); }

  /// Scaled kernel as a function of the squared ambient distance.
  double eval_squared(KernelKind kind, double dist2) const;
  double eval_scaled(KernelKind kind, const Point& x, const Point& y) const;
  CompiledKernel compile(KernelKind kind) const;

  KernelProfile with_delta(double new_delta) const;
  void check_delta() const;

  bool operator==(const KernelProfile&) const = default;
};

/// Registered profile ids: wendland_c2_default, gaussian_nonconforming,
/// linear_hat_r, short_support_k, negative_lobe_r.
std::vector<std::string> registered_profiles();
KernelProfile make_profile(std::string_view id, double delta, int intrinsic_dim);

struct ClauseResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::string profile_id;
  std::vector<ClauseResult> clauses;

  bool passed() const;
  const ClauseResult& clause(std::string_view name) const;
  std::vector<std::string> failed_clauses() const;
};

/// Checks the kernel assumptions clause by clause: smoothness (C^2 matching
/// at each support edge), nonnegativity, compact support (R beyond 1, K beyond
/// r0, r0 >= 2) and the nondegeneracy floors. Failures are report entries.
ValidationReport validate_profile(const KernelProfile& profile, std::size_t samples = 1000);

/// Integrated tail of R: integral of R(s) over [r, inf).
double rbar(const KernelProfile& profile, double r);
/// Adaptive Gauss-Kronrod evaluation of the tail (abs tol 1e-12).
double rbar_quadrature(const RadialProfile& shape, double r);

}  // namespace wnll
