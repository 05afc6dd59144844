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
#include <optional>
#include <string>
#include <vector>

#include "wnll/discrepancy.hpp"
#include "wnll/fit.hpp"
#include "wnll/geometry.hpp"
#include "wnll/io.hpp"
#include "wnll/solver.hpp"

namespace wnll {

enum class ExperimentMode { kConvergence, kMuStudy, kLabelRate, kDiscrepancy, kConsistency };
std::string to_string(ExperimentMode mode);
ExperimentMode parse_experiment_mode(std::string_view name);

struct DeltaRule {
  enum class Kind { kFixedList, kPowerOfN };
  Kind kind = Kind::kFixedList;
  std::vector<double> values;
  /// power_of_n: delta = a n^(-exponent). Exponent defaults to 1/(2k+6).
  double a = 1.0;
  std::optional<double> exponent;
  bool enforce_coupling = false;

  /// Bandwidths for a cloud of n points on a k-dimensional manifold.
  std::vector<double> deltas_for(std::size_t n, int k) const;
  /// Largest exponent compatible with the sampling/bandwidth coupling.
  static double coupling_exponent(int k) { return 1.0 / (2.0 * k + 6.0); }
};

struct MuRule {
  enum class Kind { kDefaultRatio, kFixed, kElEquivalent };
  Kind kind = Kind::kDefaultRatio;
  double value = 0.0;

  /// unlabeled = |P|, labeled = |S|.
  double mu_for(std::size_t unlabeled, std::size_t labeled) const;
};

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::kConvergence;
  ManifoldSpec manifold;
  RegionSpec region;
  LabelFunction label_fn;
  SamplingMode sampling = SamplingMode::kQuasiUniform;
  /// |P| in convergence and mu_study modes; |P| + |S| in label_rate mode.
  std::vector<std::size_t> n_ladder;
  std::size_t m = 0;
  std::vector<std::size_t> label_counts;
  std::vector<double> mu_values;
  DeltaRule delta_rule;
  MuRule mu_rule;
  std::string profile = "wendland_c2_default";
  std::vector<std::uint64_t> seeds{0};
  SolveOptions solver;
  double c_margin = 1.0;
  ReferenceOptions reference;
  bool compute_errors = true;
  std::size_t centers_per_dim = 512;
  /// Consistency queries as intrinsic coordinates; chosen automatically when empty.
  std::vector<Intrinsic> queries;
  /// Output prefix: <output>.csv and <output>.json. Empty: JSON to stdout.
  std::string output;

  /// Parses and validates; InvalidArgument on any schema or range violation.
  static ExperimentConfig from_json(const Json& j);
  Json to_json() const;
  void validate() const;
};

/// One solve (or skipped solve) of the study. Optional fields serialize as null.
struct RunRow {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  double delta = 0.0;
  double mu = 0.0;
  std::string method = "wnll";
  std::optional<double> err_max;
  std::optional<double> err_l2;
  std::optional<double> jump;
  bool connected = false;
  std::size_t unreachable = 0;
  std::optional<double> mu_margin;
  std::size_t iterations = 0;
  std::optional<double> residual;
  bool converged = false;
  double wall_time = 0.0;
};

struct SlopeFit {
  std::uint64_t seed = 0;
  /// Set when rows are grouped by (seed, n); unset when grouped by seed.
  std::optional<std::size_t> n;
  std::string method;
  std::string metric;
  std::size_t points = 0;
  LineFit fit;
};

struct ConsistencyRow {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  double delta = 0.0;
  double max_residual = 0.0;
  std::size_t queries = 0;
};

struct Report {
  Json config;
  ExperimentMode mode = ExperimentMode::kConvergence;
  std::vector<RunRow> rows;
  std::vector<SlopeFit> slopes;
  std::vector<DiscrepancyRow> discrepancy_rows;
  std::vector<ConsistencyRow> consistency_rows;
  Json summary = Json::object();
  double wall_time = 0.0;

  Json to_json() const;
  static Report from_json(const Json& j);
  /// Mode-specific CSV table; contains no timings.
  std::string to_csv() const;
};

/// Least-squares slopes of log error against log delta. Rows are grouped by
/// (seed, method, n), or by (seed, method) when `group_by_n` is false; rows
/// with null or non-positive errors are skipped, groups need two points.
std::vector<SlopeFit> fit_slopes(const std::vector<RunRow>& rows, bool group_by_n);

/// Jump metric: max over labeled s of |u(x*) - b(s)|, x* the unlabeled point
/// nearest s within `radius` (lowest index on ties). Zero when no pair qualifies.
double jump_metric(const PointList& unlabeled, const std::vector<double>& u, const LabeledSet& labeled,
                   double radius, int ambient_dim);

Report run_experiment(const ExperimentConfig& config);

/// Writes <output>.csv and <output>.json.
void write_report(const Report& report, const std::string& prefix);

}  // namespace wnll
