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

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "wnll/geometry.hpp"
#include "wnll/graph.hpp"
#include "wnll/kernels.hpp"
#include "wnll/solver.hpp"

namespace wnll {

using Json = nlohmann::json;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
/// Parses a whole field as a double; throws ParseError on trailing junk.
double parse_double(std::string_view text, std::size_t line);

/// Points read from a CSV file, with the ambient dimension taken from the header.
struct PointTable {
  int ambient_dim = 0;
  PointList points;
  std::vector<double> values;  // the b column, labeled files only
};

/// Header x0..x{d-1}; labeled files append a b column.
void write_points_csv(std::ostream& out, const PointList& points, int ambient_dim);
void write_labeled_csv(std::ostream& out, const PointList& points, const std::vector<double>& values, int ambient_dim);
PointTable read_points_csv(std::istream& in);
PointTable read_labeled_csv(std::istream& in);

void save_cloud_csv(const std::string& path, const PointCloud& cloud);
void save_labeled_csv(const std::string& path, const LabeledSet& labeled, int ambient_dim);
PointTable load_points_csv(const std::string& path);
PointTable load_labeled_csv(const std::string& path);

/// Coordinates, solution value, and a labeled flag (0/1) per row, unlabeled points first.
void write_solution_csv(std::ostream& out, const PointList& unlabeled, const std::vector<double>& u,
                        const PointList& labeled, const std::vector<double>& b, int ambient_dim);

Json to_json(const ManifoldSpec& spec);
ManifoldSpec manifold_from_json(const Json& j);
Json to_json(const RegionSpec& region);
RegionSpec region_from_json(const Json& j, const ManifoldSpec& spec);
Json to_json(const LabelFunction& fn);
LabelFunction label_function_from_json(const Json& j);

/// JSON envelope: {"manifold", "seed", "mode", "points"}.
Json to_json(const PointCloud& cloud);
PointCloud cloud_from_json(const Json& j);
/// {"seed", "region" (optional), "points", "values"}.
Json to_json(const LabeledSet& labeled, const ManifoldSpec& spec);
LabeledSet labeled_from_json(const Json& j, const ManifoldSpec& spec);

Json to_json(const ValidationReport& report);
Json to_json(const GraphStats& stats);
Json to_json(const ConnectivityReport& report);
Json to_json(const SolveStats& stats);
Json to_json(const ConditionReport& report);

/// Reads a whole file; ParseError if it cannot be opened.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view text);

}  // namespace wnll
