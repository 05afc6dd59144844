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

#include "wnll/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace wnll {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::size_t line) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ParseError("malformed number '" + std::string(text) + "'", line);
  return v;
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (auto& f : out) {
    while (!f.empty() && (f.front() == ' ' || f.back() == '\r' || f.back() == ' ')) {
      if (f.front() == ' ') f.remove_prefix(1);
      else f.remove_suffix(1);
    }
  }
  return out;
}

PointTable read_csv(std::istream& in, bool labeled) {
  std::string line;
  std::size_t line_no = 0;
  PointTable table;
  if (!std::getline(in, line)) throw ParseError("empty file: missing header", 1);
  ++line_no;
  const auto header = split(line);
  const std::size_t coords = labeled ? header.size() - 1 : header.size();
  if (header.empty() || (labeled && header.size() < 2)) throw ParseError("header has too few columns", line_no);
  if (coords > static_cast<std::size_t>(kMaxAmbientDim)) throw ParseError("more than 4 coordinate columns", line_no);
  for (std::size_t c = 0; c < coords; ++c)
    if (header[c] != "x" + std::to_string(c))
      throw ParseError("expected column 'x" + std::to_string(c) + "', found '" + std::string(header[c]) + "'", line_no);
  if (labeled && header.back() != "b") throw ParseError("expected final column 'b'", line_no);
  table.ambient_dim = static_cast<int>(coords);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line);
    if (fields.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()),
                       line_no);
    Point p{};
    for (std::size_t c = 0; c < coords; ++c) p[c] = parse_double(fields[c], line_no);
    table.points.push_back(p);
    if (labeled) table.values.push_back(parse_double(fields.back(), line_no));
  }
  return table;
}

void write_header(std::ostream& out, int dim, bool labeled) {
  for (int c = 0; c < dim; ++c) out << (c ? "," : "") << 'x' << c;
  if (labeled) out << ",b";
  out << '\n';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open '" + path + "'", 0);
  return f;
}

}  // namespace

void write_points_csv(std::ostream& out, const PointList& points, int ambient_dim) {
  write_header(out, ambient_dim, false);
  for (const Point& p : points) {
    for (int c = 0; c < ambient_dim; ++c) out << (c ? "," : "") << format_double(p[c]);
    out << '\n';
  }
}

void write_labeled_csv(std::ostream& out, const PointList& points, const std::vector<double>& values, int ambient_dim) {
  if (points.size() != values.size()) throw InvalidArgument("labeled points and values differ in length");
  write_header(out, ambient_dim, true);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (int c = 0; c < ambient_dim; ++c) out << format_double(points[i][c]) << ',';
    out << format_double(values[i]) << '\n';
  }
}

PointTable read_points_csv(std::istream& in) { return read_csv(in, false); }
PointTable read_labeled_csv(std::istream& in) { return read_csv(in, true); }

void save_cloud_csv(const std::string& path, const PointCloud& cloud) {
  auto f = open_out(path);
  write_points_csv(f, cloud.points, cloud.spec.ambient_dim());
}

void save_labeled_csv(const std::string& path, const LabeledSet& labeled, int ambient_dim) {
  auto f = open_out(path);
  write_labeled_csv(f, labeled.points, labeled.values, ambient_dim);
}

PointTable load_points_csv(const std::string& path) {
  auto f = open_in(path);
  return read_points_csv(f);
}

PointTable load_labeled_csv(const std::string& path) {
  auto f = open_in(path);
  return read_labeled_csv(f);
}

void write_solution_csv(std::ostream& out, const PointList& unlabeled, const std::vector<double>& u,
                        const PointList& labeled, const std::vector<double>& b, int ambient_dim) {
  for (int c = 0; c < ambient_dim; ++c) out << 'x' << c << ',';
  out << "u,labeled\n";
  auto row = [&](const Point& p, double v, int flag) {
    for (int c = 0; c < ambient_dim; ++c) out << format_double(p[c]) << ',';
    out << format_double(v) << ',' << flag << '\n';
  };
  for (std::size_t i = 0; i < unlabeled.size(); ++i) row(unlabeled[i], u[i], 0);
  for (std::size_t i = 0; i < labeled.size(); ++i) row(labeled[i], b[i], 1);
}

Json to_json(const ManifoldSpec& spec) { return {{"kind", to_string(spec.kind)}, {"scale", spec.scale}}; }

ManifoldSpec manifold_from_json(const Json& j) {
  ManifoldSpec spec;
  spec.kind = parse_manifold_kind(j.at("kind").get<std::string>());
  spec.scale = j.value("scale", 1.0);
  spec.validate();
  return spec;
}

Json to_json(const RegionSpec& region) {
  Json center = Json::array({region.center[0]});
  if (region.kind == RegionKind::kCap) center.push_back(region.center[1]);
  return {{"kind", to_string(region.kind)}, {"center", center}, {"radius", region.radius}};
}

RegionSpec region_from_json(const Json& j, const ManifoldSpec& spec) {
  RegionSpec region;
  region.manifold = spec;
  region.kind = parse_region_kind(j.at("kind").get<std::string>());
  const Json& c = j.at("center");
  if (c.is_number()) {
    region.center = {c.get<double>(), 0.0};
  } else {
    const auto v = c.get<std::vector<double>>();
    if (v.empty() || v.size() > 2) throw InvalidArgument("region center needs one or two intrinsic coordinates");
    region.center = {v[0], v.size() > 1 ? v[1] : 0.0};
  }
  region.radius = j.at("radius").get<double>();
  region.validate();
  return region;
}

Json to_json(const LabelFunction& fn) {
  Json j{{"id", fn.id()}};
  if (fn.offset != 0.0) j["offset"] = fn.offset;
  if (fn.kind == LabelKind::kTabulated) j["table"] = fn.table;
  return j;
}

LabelFunction label_function_from_json(const Json& j) {
  if (j.is_string()) return LabelFunction::from_id(j.get<std::string>());
  LabelFunction fn = LabelFunction::from_id(j.at("id").get<std::string>());
  fn.offset = j.value("offset", 0.0);
  if (fn.kind == LabelKind::kTabulated) {
    fn.table = j.at("table").get<std::vector<double>>();
    if (fn.table.size() < 2) throw InvalidArgument("tabulated label function needs at least two samples");
  }
  return fn;
}

namespace {

Json points_json(const PointList& points, int dim) {
  Json arr = Json::array();
  for (const Point& p : points) arr.push_back(std::vector<double>(p.begin(), p.begin() + dim));
  return arr;
}

PointList points_from_json(const Json& arr, int dim) {
  PointList out;
  for (const Json& row : arr) {
    const auto v = row.get<std::vector<double>>();
    if (static_cast<int>(v.size()) != dim) throw ParseError("point has " + std::to_string(v.size()) + " coordinates, expected " + std::to_string(dim), 0);
    Point p{};
    std::copy(v.begin(), v.end(), p.begin());
    out.push_back(p);
  }
  return out;
}

}  // namespace

Json to_json(const PointCloud& cloud) {
  return {{"manifold", to_json(cloud.spec)},
          {"seed", cloud.seed},
          {"mode", to_string(cloud.mode)},
          {"points", points_json(cloud.points, cloud.spec.ambient_dim())}};
}

PointCloud cloud_from_json(const Json& j) {
  PointCloud cloud;
  cloud.spec = manifold_from_json(j.at("manifold"));
  cloud.seed = j.at("seed").get<std::uint64_t>();
  cloud.mode = parse_sampling_mode(j.at("mode").get<std::string>());
  cloud.points = points_from_json(j.at("points"), cloud.spec.ambient_dim());
  return cloud;
}

Json to_json(const LabeledSet& labeled, const ManifoldSpec& spec) {
  Json j{{"seed", labeled.seed},
         {"points", points_json(labeled.points, spec.ambient_dim())},
         {"values", labeled.values}};
  if (labeled.region) j["region"] = to_json(*labeled.region);
  return j;
}

LabeledSet labeled_from_json(const Json& j, const ManifoldSpec& spec) {
  LabeledSet s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.points = points_from_json(j.at("points"), spec.ambient_dim());
  s.values = j.at("values").get<std::vector<double>>();
  if (s.values.size() != s.points.size()) throw ParseError("labeled values and points differ in length", 0);
  if (j.contains("region")) s.region = region_from_json(j.at("region"), spec);
  return s;
}

Json to_json(const ValidationReport& report) {
  Json clauses = Json::array();
  for (const auto& c : report.clauses) clauses.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"profile", report.profile_id}, {"passed", report.passed()}, {"clauses", clauses}};
}

Json to_json(const GraphStats& s) {
  return {{"unlabeled", s.unlabeled},
          {"labeled", s.labeled},
          {"r_edges", s.r_edges},
          {"k_edges", s.k_edges},
          {"d_r", {{"min", s.d_r_min}, {"mean", s.d_r_mean}, {"max", s.d_r_max}}},
          {"d_k", {{"min", s.d_k_min}, {"mean", s.d_k_mean}, {"max", s.d_k_max}}},
          {"degree_histogram", {{"lo", s.degree_lo}, {"hi", s.degree_hi}, {"counts", s.degree_histogram}}}};
}

Json to_json(const ConnectivityReport& r) {
  return {{"s_connected", r.s_connected}, {"unreachable", r.unreachable}, {"max_hops", r.max_hops}};
}

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const SolveStats& s) {
  return {{"iterations", s.iterations},
          {"final_residual", number_or_null(s.final_residual)},
          {"converged", s.converged},
          {"wall_time", s.wall_time}};
}

Json to_json(const ConditionReport& r) {
  return {{"passed", r.passed},
          {"vacuous", r.vacuous},
          {"min_ratio", number_or_null(r.min_ratio)},
          {"argmin", r.argmin},
          {"points_checked", r.points_checked}};
}

std::string read_file(const std::string& path) {
  auto f = open_in(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view text) {
  auto f = open_out(path);
  f << text;
  if (!f) throw Error("failed writing '" + path + "'");
}

}  // namespace wnll
