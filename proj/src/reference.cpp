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

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "wnll/geometry.hpp"

namespace wnll {

namespace {

double wrap_positive(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

/// Cubic Lagrange weights for fractional position t in [-1, 2] relative to
/// nodes {-1, 0, 1, 2}.
std::array<double, 4> cubic_weights(double t) {
  return {-t * (t - 1.0) * (t - 2.0) / 6.0, (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
          -(t + 1.0) * t * (t - 2.0) / 2.0, (t + 1.0) * t * (t - 1.0) / 6.0};
}

/// Interpolates f on nodes 0..last (non-periodic) at continuous position pos.
template <class F>
double interp_line(double pos, std::size_t last, F&& f) {
  auto base = static_cast<std::ptrdiff_t>(std::floor(pos)) - 1;
  base = std::clamp<std::ptrdiff_t>(base, 0, static_cast<std::ptrdiff_t>(last) - 3);
  const auto w = cubic_weights(pos - static_cast<double>(base) - 1.0);
  double s = 0.0;
  for (int q = 0; q < 4; ++q) s += w[q] * f(static_cast<std::size_t>(base + q));
  return s;
}

// Circle: u is linear in arclength on the complement of the arc.
std::vector<double> circle_solution(const RegionSpec& region, const LabelFunction& fn, const PointList& queries) {
  const ManifoldSpec& spec = region.manifold;
  const double half = region.radius / spec.scale;
  const double upper = region.center[0] + half;
  const double b_upper = fn.value(spec, spec.embed({upper, 0.0}));
  const double b_lower = fn.value(spec, spec.embed({region.center[0] - half, 0.0}));
  const double span = kTwoPi - 2.0 * half;
  std::vector<double> out(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const Point& x = queries[i];
    if (region.contains(x)) {
      out[i] = fn.value(spec, x);
      continue;
    }
    const double t = std::min(wrap_positive(spec.chart(x)[0] - upper), span);
    out[i] = b_upper + (b_lower - b_upper) * (t / span);
  }
  return out;
}

// Sphere with data symmetric about the cap axis: (sin(psi) u')' = 0 on
// [alpha, pi], u(alpha) = b, zero flux at the far pole. Finite volumes.
std::vector<double> sphere_solution(const RegionSpec& region, const LabelFunction& fn, const PointList& queries,
                                    std::size_t resolution) {
  const ManifoldSpec& spec = region.manifold;
  const double colat = region.center[0];
  const bool north = std::abs(colat) < 1e-12;
  const bool south = std::abs(colat - kPi) < 1e-12;
  const bool symmetric_fn =
      fn.kind == LabelKind::kConstant || (fn.kind == LabelKind::kCoordinate && fn.axis == 2);
  if (!(north || south) || !symmetric_fn)
    throw InvalidArgument("sphere reference supports only axisymmetric data (pole-centred cap, z-dependent label)");

  const double alpha = region.radius / spec.scale;
  const std::size_t n = resolution;
  const double h = (kPi - alpha) / static_cast<double>(n);
  const double b_edge = fn.value(spec, spec.embed({north ? alpha : kPi - alpha, 0.0}));

  // Tridiagonal system for u_1..u_n (u_0 = b_edge).
  std::vector<double> lower(n + 1), diag(n + 1), upper(n + 1), rhs(n + 1, 0.0);
  for (std::size_t j = 1; j <= n; ++j) {
    const double s_minus = std::sin(alpha + (static_cast<double>(j) - 0.5) * h);
    const double s_plus = j < n ? std::sin(alpha + (static_cast<double>(j) + 0.5) * h) : 0.0;
    lower[j] = -s_minus;
    upper[j] = -s_plus;
    diag[j] = s_minus + s_plus;
  }
  rhs[1] -= lower[1] * b_edge;
  lower[1] = 0.0;
  // Thomas algorithm.
  for (std::size_t j = 2; j <= n; ++j) {
    const double w = lower[j] / diag[j - 1];
    diag[j] -= w * upper[j - 1];
    rhs[j] -= w * rhs[j - 1];
  }
  std::vector<double> u(n + 1);
  u[0] = b_edge;
  u[n] = rhs[n] / diag[n];
  for (std::size_t j = n - 1; j >= 1; --j) u[j] = (rhs[j] - upper[j] * u[j + 1]) / diag[j];

  std::vector<double> out(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const Point& x = queries[i];
    if (region.contains(x)) {
      out[i] = fn.value(spec, x);
      continue;
    }
    const double colat_x = spec.chart(x)[0];
    const double psi = north ? colat_x : kPi - colat_x;
    out[i] = interp_line((psi - alpha) / h, n, [&](std::size_t j) { return u[j]; });
  }
  return out;
}

// Torus band: harmonic on the complementary annulus theta in [lo, lo + L],
// Dirichlet data on both band edges, periodic in phi. The 5-point scheme is
// diagonalized by the DFT in phi; each Fourier mode then solves the
// constant-coefficient recurrence in theta exactly.
std::vector<double> torus_solution(const RegionSpec& region, const LabelFunction& fn, const PointList& queries,
                                   std::size_t resolution) {
  const ManifoldSpec& spec = region.manifold;
  const double half = region.radius / spec.torus_radius();
  const double lo = region.center[0] + half;
  const double span = kTwoPi - 2.0 * half;
  const std::size_t nt = resolution;  // theta intervals
  const std::size_t np = resolution;  // phi nodes
  const double ht = span / static_cast<double>(nt);
  const double hp = kTwoPi / static_cast<double>(np);

  Eigen::FFT<double> fft;
  std::vector<double> edge0(np), edge1(np);
  for (std::size_t l = 0; l < np; ++l) {
    const double phi = hp * static_cast<double>(l);
    edge0[l] = fn.value(spec, spec.embed({lo, phi}));
    edge1[l] = fn.value(spec, spec.embed({lo + span, phi}));
  }
  std::vector<std::complex<double>> g0, g1;
  fft.fwd(g0, edge0);
  fft.fwd(g1, edge1);

  // Per mode decay rate kappa: cosh(kappa) = 1 + ht^2 lambda_k / 2.
  std::vector<double> kappa(np);
  for (std::size_t k = 0; k < np; ++k) {
    const double lambda = (2.0 - 2.0 * std::cos(kTwoPi * static_cast<double>(k) / static_cast<double>(np))) / (hp * hp);
    kappa[k] = std::acosh(1.0 + 0.5 * ht * ht * lambda);
  }
  const double total = static_cast<double>(nt);

  std::vector<double> grid((nt + 1) * np);
  std::vector<std::complex<double>> spectrum(np);
  std::vector<double> row;
  for (std::size_t j = 0; j <= nt; ++j) {
    const double jj = static_cast<double>(j);
    for (std::size_t k = 0; k < np; ++k) {
      double w0 = 0.0;
      double w1 = 0.0;
      if (kappa[k] == 0.0) {
        w1 = jj / total;
        w0 = 1.0 - w1;
      } else {
        // sinh((N-j)k)/sinh(Nk) and sinh(jk)/sinh(Nk), overflow-free.
        const double denom = -std::expm1(-2.0 * total * kappa[k]);
        w0 = std::exp(-jj * kappa[k]) * -std::expm1(-2.0 * (total - jj) * kappa[k]) / denom;
        w1 = std::exp(-(total - jj) * kappa[k]) * -std::expm1(-2.0 * jj * kappa[k]) / denom;
      }
      spectrum[k] = w0 * g0[k] + w1 * g1[k];
    }
    fft.inv(row, spectrum);
    std::copy(row.begin(), row.end(), grid.begin() + static_cast<std::ptrdiff_t>(j * np));
  }

  std::vector<double> out(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const Point& x = queries[i];
    if (region.contains(x)) {
      out[i] = fn.value(spec, x);
      continue;
    }
    const Intrinsic t = spec.chart(x);
    const double pos_t = std::min(wrap_positive(t[0] - lo), span) / ht;
    const double pos_p = wrap_positive(t[1]) / hp;
    const auto base_p = static_cast<std::ptrdiff_t>(std::floor(pos_p)) - 1;
    const auto wp = cubic_weights(pos_p - static_cast<double>(base_p) - 1.0);
    out[i] = interp_line(pos_t, nt, [&](std::size_t j) {
      double s = 0.0;
      for (int q = 0; q < 4; ++q) {
        const auto l = static_cast<std::size_t>((base_p + q + static_cast<std::ptrdiff_t>(np)) %
                                                static_cast<std::ptrdiff_t>(np));
        s += wp[q] * grid[j * np + l];
      }
      return s;
    });
  }
  return out;
}

void check_reference_inputs(const RegionSpec& region, const LabelFunction& fn, const PointList& queries) {
  region.validate();
  fn.check_defined(region.manifold);
  for (const Point& x : queries) require_on_manifold(region.manifold, x);
}

}  // namespace

std::vector<double> reference_at_resolution(const RegionSpec& region, const LabelFunction& label_fn,
                                            const PointList& queries, std::size_t resolution) {
  check_reference_inputs(region, label_fn, queries);
  if (resolution < 4) throw InvalidArgument("reference resolution must be at least 4");
  switch (region.manifold.kind) {
    case ManifoldKind::kCircle:
      return circle_solution(region, label_fn, queries);
    case ManifoldKind::kSphere:
      return sphere_solution(region, label_fn, queries, resolution);
    case ManifoldKind::kCliffordTorus:
      return torus_solution(region, label_fn, queries, resolution);
  }
  return {};
}

std::vector<double> reference_harmonic_solution(const RegionSpec& region, const LabelFunction& label_fn,
                                                const PointList& queries, const ReferenceOptions& options) {
  check_reference_inputs(region, label_fn, queries);
  if (region.manifold.kind == ManifoldKind::kCircle) return circle_solution(region, label_fn, queries);

  std::size_t res = std::max<std::size_t>(options.resolution, 4);
  std::vector<double> prev = reference_at_resolution(region, label_fn, queries, res);
  while (res * 2 <= options.max_resolution) {
    res *= 2;
    std::vector<double> next = reference_at_resolution(region, label_fn, queries, res);
    double change = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) change = std::max(change, std::abs(next[i] - prev[i]));
    prev = std::move(next);
    if (change < options.tolerance) return prev;
  }
  throw ConvergenceError("reference oracle did not converge by resolution " + std::to_string(res));
}

}  // namespace wnll
