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

// Python extension: thin wrappers over the C++ library. Structured results
// cross the boundary as JSON text and are decoded in wnll/__init__.py.

#include <optional>
#include <string>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wnll/experiment.hpp"
#include "wnll/graph.hpp"
#include "wnll/io.hpp"
#include "wnll/kernels.hpp"
#include "wnll/solver.hpp"

namespace py = pybind11;
using namespace wnll;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

PointList to_points(const Array& a, int& dim) {
  if (a.ndim() != 2) throw InvalidArgument("points must be a 2-d array");
  const auto n = static_cast<std::size_t>(a.shape(0));
  dim = static_cast<int>(a.shape(1));
  if (dim < 1 || dim > kMaxAmbientDim) throw InvalidArgument("points need 1 to 4 columns");
  const auto r = a.unchecked<2>();
  PointList out(n, Point{});
  for (std::size_t i = 0; i < n; ++i)
    for (int c = 0; c < dim; ++c) out[i][c] = r(static_cast<py::ssize_t>(i), c);
  return out;
}

Array from_points(const PointList& pts, int dim) {
  Array out({static_cast<py::ssize_t>(pts.size()), static_cast<py::ssize_t>(dim)});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int c = 0; c < dim; ++c) w(static_cast<py::ssize_t>(i), c) = pts[i][c];
  return out;
}

Array from_vector(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

int default_dim(int ambient) { return ambient <= 2 ? 1 : 2; }

struct Inputs {
  PointList p, s;
  std::vector<double> b;
  int dim = 0;
};

Inputs read_inputs(const Array& unlabeled, const Array& labeled, std::optional<Array> values) {
  Inputs in;
  int sdim = 0;
  in.p = to_points(unlabeled, in.dim);
  in.s = to_points(labeled, sdim);
  if (sdim != in.dim) throw InvalidArgument("unlabeled and labeled points have different dimensions");
  if (values) {
    if (values->ndim() != 1 || static_cast<std::size_t>(values->shape(0)) != in.s.size())
      throw InvalidArgument("values must hold one entry per labeled point");
    in.b.assign(values->data(), values->data() + values->shape(0));
  }
  return in;
}

ManifoldSpec manifold(const std::string& kind, double scale) {
  ManifoldSpec spec{parse_manifold_kind(kind), scale};
  spec.validate();
  return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Weighted nonlocal Laplacian interpolation on point clouds";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());

  m.def(
      "sample_manifold",
      [](const std::string& kind, std::size_t n, std::uint64_t seed, const std::string& sampling, double scale) {
        const auto spec = manifold(kind, scale);
        const auto cloud = sample_manifold(spec, n, seed, parse_sampling_mode(sampling));
        return from_points(cloud.points, spec.ambient_dim());
      },
      py::arg("manifold"), py::arg("n"), py::arg("seed") = 0, py::arg("sampling") = "uniform_random",
      py::arg("scale") = 1.0);

  m.def(
      "sample_labeled",
      [](const std::string& kind, const std::string& region_json, std::size_t count, std::uint64_t seed,
         const std::string& label_fn_json, double scale) {
        const auto spec = manifold(kind, scale);
        const auto region = region_from_json(Json::parse(region_json), spec);
        const auto fn = label_function_from_json(Json::parse(label_fn_json));
        const auto set = sample_labeled(region, count, seed, fn);
        return py::make_tuple(from_points(set.points, spec.ambient_dim()), from_vector(set.values));
      },
      py::arg("manifold"), py::arg("region"), py::arg("m"), py::arg("seed"), py::arg("label_fn"), py::arg("scale"));

  m.def(
      "validate_kernel",
      [](const std::string& profile, double delta, int dim) {
        return to_json(validate_profile(make_profile(profile, delta, dim))).dump();
      },
      py::arg("profile"), py::arg("delta"), py::arg("intrinsic_dim"));

  m.def(
      "rbar", [](const std::string& profile, double r) { return rbar(make_profile(profile, 1.0, 1), r); },
      py::arg("profile"), py::arg("r"));

  m.def(
      "check_connectivity",
      [](const Array& unlabeled, const Array& labeled, double delta, const std::string& profile,
         std::optional<int> dim) {
        const Inputs in = read_inputs(unlabeled, labeled, std::nullopt);
        py::gil_scoped_release release;
        const auto kp = make_profile(profile, delta, dim.value_or(default_dim(in.dim)));
        const auto graph = AffinityGraph::assemble(in.p, in.s, kp, in.dim);
        Json out = to_json(check_s_connected(graph));
        out["graph"] = to_json(graph.stats());
        return out.dump();
      },
      py::arg("unlabeled"), py::arg("labeled"), py::arg("delta"), py::arg("profile"), py::arg("intrinsic_dim"));

  m.def(
      "solve",
      [](const Array& unlabeled, const Array& labeled, const Array& values, double delta, std::optional<double> mu,
         const std::string& method, double tol, std::size_t max_iter, const std::string& profile,
         std::optional<int> dim) {
        const Inputs in = read_inputs(unlabeled, labeled, values);
        Solution sol;
        double used_mu = 0.0;
        {
          py::gil_scoped_release release;
          const auto kp = make_profile(profile, delta, dim.value_or(default_dim(in.dim)));
          const auto graph = AffinityGraph::assemble(in.p, in.s, kp, in.dim);
          LabeledSet set;
          set.points = in.s;
          set.values = in.b;
          used_mu = mu.value_or(default_mu(in.p.size(), in.s.size()));
          const auto system = assemble_wnll(graph, set, used_mu);
          sol = solve(system, {parse_solve_method(method), tol, max_iter});
        }
        Json stats = to_json(sol.stats);
        stats["mu"] = used_mu;
        return py::make_tuple(from_vector(sol.values), stats.dump());
      },
      py::arg("unlabeled"), py::arg("labeled"), py::arg("values"), py::arg("delta"), py::arg("mu"), py::arg("method"),
      py::arg("tol"), py::arg("max_iter"), py::arg("profile"), py::arg("intrinsic_dim"));

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const auto config = ExperimentConfig::from_json(Json::parse(config_json));
        py::gil_scoped_release release;
        return run_experiment(config).to_json().dump();
      },
      py::arg("config"));

  m.def("default_mu", py::overload_cast<std::size_t, std::size_t>(&default_mu), py::arg("unlabeled"),
        py::arg("labeled"));
  m.def("registered_profiles", &registered_profiles);
}
