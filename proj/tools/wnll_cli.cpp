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

// Command-line front end: run studies, validate kernels, check connectivity,
// and solve interpolation problems stored as CSV.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wnll/experiment.hpp"
#include "wnll/graph.hpp"
#include "wnll/io.hpp"
#include "wnll/kernels.hpp"
#include "wnll/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidKernel = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDisconnected = 3;
constexpr int kExitSolver = 4;

int default_intrinsic_dim(int ambient) { return ambient <= 2 ? 1 : 2; }

struct GraphInputs {
  wnll::PointTable cloud;
  wnll::PointTable labels;
  wnll::LabeledSet labeled;
};

GraphInputs load_inputs(const std::string& cloud_path, const std::string& labels_path) {
  GraphInputs in;
  in.cloud = wnll::load_points_csv(cloud_path);
  in.labels = wnll::load_labeled_csv(labels_path);
  if (in.cloud.ambient_dim != in.labels.ambient_dim)
    throw wnll::InvalidArgument("cloud and labels have different dimensions");
  in.labeled.points = in.labels.points;
  in.labeled.values = in.labels.values;
  return in;
}

int cmd_run(const std::string& path) {
  wnll::ExperimentConfig config;
  try {
    config = wnll::ExperimentConfig::from_json(wnll::Json::parse(wnll::read_file(path)));
  } catch (const wnll::Json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  const wnll::Report report = wnll::run_experiment(config);
  if (config.output.empty()) {
    std::cout << report.to_json().dump(2) << '\n';
  } else {
    wnll::write_report(report, config.output);
    std::cerr << "wrote " << config.output << ".csv and " << config.output << ".json\n";
  }
  return kExitOk;
}

int cmd_validate(const std::string& id, double delta, int dim) {
  const wnll::KernelProfile profile = wnll::make_profile(id, delta, dim);
  const wnll::ValidationReport report = wnll::validate_profile(profile);
  std::cout << wnll::to_json(report).dump(2) << '\n';
  return report.passed() ? kExitOk : kExitInvalidKernel;
}

int cmd_connectivity(const std::string& cloud_path, const std::string& labels_path, double delta,
                     const std::string& profile_id, std::optional<int> dim, bool require) {
  const GraphInputs in = load_inputs(cloud_path, labels_path);
  const int k = dim.value_or(default_intrinsic_dim(in.cloud.ambient_dim));
  const auto profile = wnll::make_profile(profile_id, delta, k);
  const auto graph = wnll::AffinityGraph::assemble(in.cloud.points, in.labeled.points, profile, in.cloud.ambient_dim);
  const auto report = wnll::check_s_connected(graph);
  wnll::Json out = wnll::to_json(report);
  out["graph"] = wnll::to_json(graph.stats());
  std::cout << out.dump(2) << '\n';
  return require && !report.s_connected ? kExitDisconnected : kExitOk;
}

struct SolveArgs {
  std::string cloud, labels, out, method = "cg", profile = "wendland_c2_default", stats;
  std::optional<double> mu;
  bool mu_el = false, require = false;
  double tol = 1e-10, delta = 0.0;
  std::size_t max_iter = 0;
  std::optional<int> dim;
};

int cmd_solve(const SolveArgs& a) {
  const GraphInputs in = load_inputs(a.cloud, a.labels);
  const int k = a.dim.value_or(default_intrinsic_dim(in.cloud.ambient_dim));
  const auto profile = wnll::make_profile(a.profile, a.delta, k);
  const auto graph = wnll::AffinityGraph::assemble(in.cloud.points, in.labeled.points, profile, in.cloud.ambient_dim);
  const auto conn = wnll::check_s_connected(graph);
  if (!conn.s_connected) {
    std::cerr << conn.unreachable.size() << " unlabeled points cannot reach a label\n";
    if (a.require) return kExitDisconnected;
  }
  const std::size_t n = in.cloud.points.size(), m = in.labeled.points.size();
  double mu = a.mu ? *a.mu : wnll::default_mu(n, m);
  if (a.mu_el) mu = (wnll::default_mu(n, m) + 2.0) / 2.0;
  const auto system = wnll::assemble_wnll(graph, in.labeled, mu);
  const wnll::SolveOptions options{wnll::parse_solve_method(a.method), a.tol, a.max_iter};
  const auto sol = wnll::solve(system, options);
  {
    std::ofstream f(a.out);
    if (!f) throw wnll::Error("cannot open '" + a.out + "' for writing");
    wnll::write_solution_csv(f, in.cloud.points, sol.values, in.labeled.points, in.labeled.values, in.cloud.ambient_dim);
  }
  wnll::Json stats = wnll::to_json(sol.stats);
  stats["mu"] = mu;
  stats["s_connected"] = conn.s_connected;
  if (!a.stats.empty()) wnll::write_file(a.stats, stats.dump(2) + "\n");
  std::cout << stats.dump(2) << '\n';
  return sol.stats.converged ? kExitOk : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted nonlocal Laplacian interpolation on point clouds"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  run->add_option("config", config_path, "Config file")->required();

  std::string profile_id;
  double vk_delta = 0.1;
  int vk_dim = 1;
  auto* vk = app.add_subcommand("validate-kernel", "Check a registered kernel profile clause by clause");
  vk->add_option("profile", profile_id, "Profile id")->required();
  vk->add_option("--delta", vk_delta, "Bandwidth");
  vk->add_option("--dim", vk_dim, "Intrinsic dimension");

  std::string cc_cloud, cc_labels, cc_profile = "wendland_c2_default";
  double cc_delta = 0.0;
  std::optional<int> cc_dim;
  bool cc_require = false;
  auto* cc = app.add_subcommand("check-connectivity", "Report which unlabeled points reach a label");
  cc->add_option("cloud", cc_cloud, "Unlabeled points (CSV)")->required();
  cc->add_option("labels", cc_labels, "Labeled points with b column (CSV)")->required();
  cc->add_option("--delta", cc_delta, "Bandwidth")->required();
  cc->add_option("--profile", cc_profile, "Kernel profile id");
  cc->add_option("--intrinsic-dim", cc_dim, "Intrinsic dimension (default from ambient)");
  cc->add_flag("--require-connected", cc_require, "Exit 3 when any point is unreachable");

  SolveArgs sa;
  auto* sv = app.add_subcommand("solve", "Solve the interpolation system for CSV inputs");
  sv->add_option("cloud", sa.cloud, "Unlabeled points (CSV)")->required();
  sv->add_option("labels", sa.labels, "Labeled points with b column (CSV)")->required();
  sv->add_option("--out", sa.out, "Solution CSV")->required();
  sv->add_option("--delta", sa.delta, "Bandwidth")->required();
  sv->add_option("--mu", sa.mu, "Labeled weight (default n/m)");
  sv->add_flag("--mu-el", sa.mu_el, "Use (n/m + 2)/2");
  sv->add_option("--method", sa.method, "cg or dense");
  sv->add_option("--tol", sa.tol, "Relative residual tolerance");
  sv->add_option("--max-iter", sa.max_iter, "CG iteration cap (0: 10 n)");
  sv->add_option("--profile", sa.profile, "Kernel profile id");
  sv->add_option("--intrinsic-dim", sa.dim, "Intrinsic dimension (default from ambient)");
  sv->add_option("--stats", sa.stats, "Also write solve stats JSON here");
  sv->add_flag("--require-connected", sa.require, "Exit 3 when any point is unreachable");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path);
    if (*vk) return cmd_validate(profile_id, vk_delta, vk_dim);
    if (*cc) return cmd_connectivity(cc_cloud, cc_labels, cc_delta, cc_profile, cc_dim, cc_require);
    if (*sv) return cmd_solve(sa);
  } catch (const wnll::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const wnll::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const wnll::ConvergenceError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitOk;
}
