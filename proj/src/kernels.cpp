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

#include "wnll/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace wnll {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double RadialProfile::value(double r) const {
  if (family == ProfileFamily::kGaussian) return std::exp(-r);
  if (r > support) return 0.0;
  const double t = r / support;
  double q_val = 0.0;
  for (auto it = q.rbegin(); it != q.rend(); ++it) q_val = q_val * t + *it;
  return std::pow(1.0 - t, edge_power) * q_val;
}

std::vector<double> RadialProfile::monomials() const {
  if (!compact()) throw InvalidArgument("only compact polynomial profiles expand to monomials");
  // (1 - t)^p * q(t) in powers of t, then t = r / support.
  std::vector<double> poly = q;
  for (int k = 0; k < edge_power; ++k) {
    std::vector<double> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] += poly[i];
      next[i + 1] -= poly[i];
    }
    poly = std::move(next);
  }
  double scale = 1.0;
  for (double& c : poly) {
    c *= scale;
    scale /= support;
  }
  return poly;
}

std::optional<double> RadialProfile::tail_closed_form(double r) const {
  if (!is_wendland()) return std::nullopt;
  if (r >= support) return 0.0;
  const double w = 1.0 - std::max(r, 0.0) / support;
  const double w5 = w * w * w * w * w;
  return support * (w5 - (2.0 / 3.0) * w5 * w);
}

double KernelProfile::normalization() const {
  return std::pow(4.0 * kPi * delta * delta, -0.5 * static_cast<double>(intrinsic_dim));
}

double KernelProfile::r_support_radius() const {
  return r_shape.compact() ? 2.0 * delta * std::sqrt(r_shape.support) : kInf;
}

double KernelProfile::k_support_radius() const {
  return k_shape.compact() ? 2.0 * delta * std::sqrt(r0) : kInf;
}

CompiledKernel KernelProfile::compile(KernelKind kind) const {
  const RadialProfile& shape = kind == KernelKind::kR ? r_shape : k_shape;
  CompiledKernel c;
  c.scale = normalization();
  c.r_per_d2 = 1.0 / (4.0 * delta * delta);
  if (!shape.compact()) {
    c.gaussian = true;
    return c;
  }
  if (shape.q.size() > CompiledKernel::kMaxCoefficients) throw InvalidArgument("profile polynomial degree too high");
  c.t_per_d2 = c.r_per_d2 / shape.support;
  c.edge_power = shape.edge_power;
  c.q_size = static_cast<int>(shape.q.size());
  std::copy(shape.q.begin(), shape.q.end(), c.q.begin());
  return c;
}

double KernelProfile::eval_squared(KernelKind kind, double dist2) const { return compile(kind)(dist2); }

double KernelProfile::eval_scaled(KernelKind kind, const Point& x, const Point& y) const {
  check_delta();
  return eval_squared(kind, squared_distance(x, y));
}

void KernelProfile::check_delta() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("kernel bandwidth delta must be positive");
}

KernelProfile KernelProfile::with_delta(double new_delta) const {
  KernelProfile p = *this;
  p.delta = new_delta;
  p.check_delta();
  return p;
}

std::vector<std::string> registered_profiles() {
  return {"wendland_c2_default", "gaussian_nonconforming", "linear_hat_r", "short_support_k", "negative_lobe_r"};
}

KernelProfile make_profile(std::string_view id, double delta, int intrinsic_dim) {
  KernelProfile p;
  p.id = std::string(id);
  p.delta = delta;
  p.intrinsic_dim = intrinsic_dim;
  if (intrinsic_dim < 1) throw InvalidArgument("intrinsic dimension must be positive");
  if (id == "wendland_c2_default") {
    // defaults
  } else if (id == "gaussian_nonconforming") {
    p.r_shape = RadialProfile::gaussian();
    p.k_shape = RadialProfile::gaussian();
    p.r0 = kInf;
    p.delta0_r = 0.6;
    p.delta0_k = 0.13;
  } else if (id == "linear_hat_r") {
    // R(r) = 1 - r: first derivative jumps at the support edge.
    p.r_shape = {ProfileFamily::kCompactPolynomial, 1.0, 1, {1.0}};
  } else if (id == "short_support_k") {
    // K vanishes beyond 1.5, so K(2) = 0 breaks the floor on [0, 2].
    p.k_shape = RadialProfile::wendland(1.5);
    p.r0 = 2.0;
  } else if (id == "negative_lobe_r") {
    // R(r) = (1 - r)^4 (0.75 - r): negative on (0.75, 1).
    p.r_shape = {ProfileFamily::kCompactPolynomial, 1.0, 4, {0.75, -1.0}};
    p.delta0_r = 0.015;
  } else {
    throw InvalidArgument("unknown kernel profile '" + std::string(id) + "'");
  }
  p.check_delta();
  return p;
}

bool ValidationReport::passed() const {
  return std::all_of(clauses.begin(), clauses.end(), [](const ClauseResult& c) { return c.passed; });
}

const ClauseResult& ValidationReport::clause(std::string_view name) const {
  for (const auto& c : clauses)
    if (c.name == name) return c;
  throw InvalidArgument("no clause named '" + std::string(name) + "'");
}

std::vector<std::string> ValidationReport::failed_clauses() const {
  std::vector<std::string> out;
  for (const auto& c : clauses)
    if (!c.passed) out.push_back(c.name);
  return out;
}

ValidationReport validate_profile(const KernelProfile& profile, std::size_t samples) {
  if (samples < 100) throw InvalidArgument("validate_profile needs at least 100 samples");
  ValidationReport report{profile.id, {}};
  const double ds = static_cast<double>(samples);
  struct Named {
    const char* name;
    const RadialProfile* shape;
  };
  const Named shapes[] = {{"R", &profile.r_shape}, {"K", &profile.k_shape}};

  // Smoothness: value and one-sided first/second differences vanish at the edge.
  {
    ClauseResult c{"smoothness", true, ""};
    for (const auto& [name, shape] : shapes) {
      if (!shape->compact()) continue;
      const double rho = shape->support;
      const double h = 1e-6 * rho;
      const double f0 = shape->value(rho);
      const double f1 = shape->value(rho - h);
      const double f2 = shape->value(rho - 2.0 * h);
      const double d1 = (f0 - f1) / h;
      const double d2 = (f0 - 2.0 * f1 + f2) / (h * h);
      if (std::abs(f0) > 1e-8 || std::abs(d1) > 1e-8 || std::abs(d2) > 1e-8) {
        c.passed = false;
        c.detail += std::string(name) + " is not C^2 at its support edge (f=" + std::to_string(f0) +
                    ", f'=" + std::to_string(d1) + ", f''=" + std::to_string(d2) + "); ";
      }
    }
    report.clauses.push_back(c);
  }

  // Nonnegativity on [0, 1.5 * support] (or [0, 10] without support).
  {
    ClauseResult c{"nonnegativity", true, ""};
    for (const auto& [name, shape] : shapes) {
      const double hi = shape->compact() ? 1.5 * shape->support : 10.0;
      double lowest = kInf;
      for (std::size_t i = 0; i <= samples; ++i) lowest = std::min(lowest, shape->value(hi * static_cast<double>(i) / ds));
      if (lowest < 0.0) {
        c.passed = false;
        c.detail += std::string(name) + " reaches " + std::to_string(lowest) + "; ";
      }
    }
    report.clauses.push_back(c);
  }

  // Compact support: R(r) = 0 for r > 1, K(r) = 0 for r > r0 >= 2.
  {
    ClauseResult c{"compact_support", true, ""};
    if (!(profile.r0 >= 2.0)) {
      c.passed = false;
      c.detail += "r0 = " + std::to_string(profile.r0) + " < 2; ";
    }
    const std::pair<const char*, std::pair<const RadialProfile*, double>> edges[] = {
        {"R", {&profile.r_shape, 1.0}}, {"K", {&profile.k_shape, profile.r0}}};
    for (const auto& [name, item] : edges) {
      const auto [shape, edge] = item;
      if (!std::isfinite(edge)) {
        c.passed = false;
        c.detail += std::string(name) + " has no finite support constant; ";
        continue;
      }
      for (std::size_t i = 1; i <= samples; ++i) {
        const double r = edge * (1.0 + 2.0 * static_cast<double>(i) / ds);
        if (shape->value(r) != 0.0) {
          c.passed = false;
          c.detail += std::string(name) + " is nonzero beyond its support; ";
          break;
        }
      }
    }
    report.clauses.push_back(c);
  }

  // Nondegeneracy floors.
  {
    ClauseResult c{"nondegeneracy", true, ""};
    const std::pair<const char*, std::pair<const RadialProfile*, std::pair<double, double>>> floors[] = {
        {"R", {&profile.r_shape, {0.5, profile.delta0_r}}}, {"K", {&profile.k_shape, {2.0, profile.delta0_k}}}};
    for (const auto& [name, item] : floors) {
      const auto [shape, spec] = item;
      const auto [upto, floor] = spec;
      double lowest = kInf;
      for (std::size_t i = 0; i <= samples; ++i) lowest = std::min(lowest, shape->value(upto * static_cast<double>(i) / ds));
      if (!(floor > 0.0) || lowest < floor) {
        c.passed = false;
        c.detail += std::string(name) + " min on [0," + std::to_string(upto) + "] is " + std::to_string(lowest) +
                    " below floor " + std::to_string(floor) + "; ";
      }
    }
    report.clauses.push_back(c);
  }
  return report;
}

double rbar_quadrature(const RadialProfile& shape, double r) {
  if (r < 0.0) throw InvalidArgument("rbar needs r >= 0");
  auto f = [&](double s) { return shape.value(s); };
  double error = 0.0;
  double value = 0.0;
  if (shape.compact()) {
    if (r >= shape.support) return 0.0;
    value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, r, shape.support, 15, 1e-14, &error);
  } else {
    boost::math::quadrature::exp_sinh<double> integrator;
    value = integrator.integrate(f, r, kInf, 1e-14, &error);
  }
  if (!(error <= 1e-12)) throw ConvergenceError("rbar quadrature did not reach 1e-12");
  return value;
}

double rbar(const KernelProfile& profile, double r) {
  if (r < 0.0) throw InvalidArgument("rbar needs r >= 0");
  if (auto closed = profile.r_shape.tail_closed_form(r)) return *closed;
  return rbar_quadrature(profile.r_shape, r);
}

}  // namespace wnll
