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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "wnll/io.hpp"
#include "wnll/geometry.hpp"

using namespace wnll;

namespace {

const std::filesystem::path kDir = std::filesystem::temp_directory_path() / "wnll_test_cli";

std::string path(const std::string& name) { return (kDir / name).string(); }

int cli(const std::string& args) {
  const std::string cmd = std::string(WNLL_CLI_PATH) + " " + args + " > " + path("stdout.txt") + " 2> " + path("stderr.txt");
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_pair(const PointList& cloud, const PointList& labels, const std::vector<double>& b) {
  std::ostringstream c, l;
  write_points_csv(c, cloud, 2);
  write_labeled_csv(l, labels, b, 2);
  write_file(path("cloud.csv"), c.str());
  write_file(path("labels.csv"), l.str());
}

PointList circle(std::size_t n) { return sample_manifold(ManifoldSpec::circle(), n, 0, SamplingMode::kQuasiUniform).points; }

struct Fixture {
  Fixture() { std::filesystem::create_directories(kDir); }
  ~Fixture() { std::filesystem::remove_all(kDir); }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "validate-kernel") {
  CHECK(cli("validate-kernel wendland_c2_default --delta 0.2 --dim 2") == 0);
  CHECK(Json::parse(read_file(path("stdout.txt"))).is_object());
  CHECK(cli("validate-kernel gaussian_nonconforming --delta 0.2 --dim 1") == 1);
  CHECK(cli("validate-kernel no_such_kernel") == 2);
  CHECK(cli("") == 2);
  CHECK(cli("validate-kernel") == 2);
  for (const char* id : {"linear_hat_r", "short_support_k", "negative_lobe_r"})
    CHECK(cli(std::string("validate-kernel ") + id + " --delta 0.2 --dim 1") == 1);
}

TEST_CASE_FIXTURE(Fixture, "solve writes the solution") {
  write_pair(circle(200), {{1, 0, 0, 0}, {-1, 0, 0, 0}}, {1.0, -1.0});
  CHECK(cli("solve " + path("cloud.csv") + " " + path("labels.csv") + " --delta 0.3 --out " + path("u.csv") +
            " --stats " + path("stats.json")) == 0);
  const auto stats = Json::parse(read_file(path("stats.json")));
  CHECK(stats.at("converged") == true);
  CHECK(stats.at("mu").get<double>() == doctest::Approx(100.0));
  std::istringstream in(read_file(path("u.csv")));
  std::string line;
  std::getline(in, line);
  CHECK(line == "x0,x1,u,labeled");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const double u = parse_double(line.substr(line.find(',', line.find(',') + 1) + 1, line.rfind(',') - line.find(',', line.find(',') + 1) - 1), rows);
    CHECK(std::abs(u) <= 1.0 + 1e-9);
  }
  CHECK(rows == 202);
  CHECK(cli("solve " + path("cloud.csv") + " " + path("labels.csv") + " --delta 0.3 --method dense --out " +
            path("u.csv")) == 0);
}

TEST_CASE_FIXTURE(Fixture, "disconnected inputs") {
  // Two far clusters, labels only near the first.
  PointList cloud;
  for (int i = 0; i < 20; ++i) cloud.push_back({0.01 * i, 0, 0, 0});
  for (int i = 0; i < 15; ++i) cloud.push_back({5 + 0.01 * i, 0, 0, 0});
  write_pair(cloud, {{0.05, 0.001, 0, 0}}, {1.0});
  const std::string args = path("cloud.csv") + " " + path("labels.csv") + " --delta 0.1";
  CHECK(cli("check-connectivity " + args) == 0);
  const auto report = Json::parse(read_file(path("stdout.txt")));
  CHECK(report.at("s_connected") == false);
  CHECK(report.at("unreachable").size() == 15);
  CHECK(cli("check-connectivity " + args + " --require-connected") == 3);
  CHECK(cli("solve " + args + " --out " + path("u.csv") + " --require-connected") == 3);
  // The unreachable block has zero data, so CG stays at the zero iterate.
  CHECK(cli("solve " + args + " --out " + path("u.csv")) == 0);
  CHECK(Json::parse(read_file(path("stdout.txt"))).at("s_connected") == false);
  CHECK(read_file(path("stderr.txt")).find("15 unlabeled points") != std::string::npos);
  CHECK(cli("solve " + args + " --method dense --out " + path("u.csv")) == 4);
}

TEST_CASE_FIXTURE(Fixture, "bad inputs") {
  write_file(path("cloud.csv"), "x0,x1\n1,0\n0,zz\n");
  write_file(path("labels.csv"), "x0,x1,b\n1,0,1\n");
  CHECK(cli("solve " + path("cloud.csv") + " " + path("labels.csv") + " --delta 0.3 --out " + path("u.csv")) == 2);
  CHECK(read_file(path("stderr.txt")).find("line 3") != std::string::npos);
  CHECK(cli("solve " + path("missing.csv") + " " + path("labels.csv") + " --delta 0.3 --out " + path("u.csv")) == 2);
  write_pair(circle(50), {{1, 0, 0, 0}}, {1.0});
  CHECK(cli("solve " + path("cloud.csv") + " " + path("labels.csv") + " --delta -1 --out " + path("u.csv")) == 2);
  CHECK(cli("solve " + path("cloud.csv") + " " + path("labels.csv") + " --delta 0.3 --method lu --out " +
            path("u.csv")) == 2);
}

TEST_CASE_FIXTURE(Fixture, "run") {
  write_file(path("bad.json"), "{\"mode\": ");
  CHECK(cli("run " + path("bad.json")) == 2);
  write_file(path("bad.json"), R"({"mode": "convergence", "speed": 1})");
  CHECK(cli("run " + path("bad.json")) == 2);
  CHECK(cli("run " + path("none.json")) == 2);
  const Json config{{"mode", "convergence"},
                    {"manifold", {{"kind", "circle"}, {"scale", 1.0}}},
                    {"region", {{"kind", "arc"}, {"center", 0.0}, {"radius", 0.3}}},
                    {"label_fn", "coord:0"},
                    {"n_ladder", {300}},
                    {"m", 6},
                    {"delta_rule", {{"kind", "fixed_list"}, {"values", {0.4, 0.3}}}},
                    {"seeds", {3}},
                    {"output", path("out")}};
  write_file(path("ok.json"), config.dump());
  CHECK(cli("run " + path("ok.json")) == 0);
  const auto report = Json::parse(read_file(path("out.json")));
  CHECK(report.at("rows").size() == 2);
  CHECK(read_file(path("out.csv")).rfind("seed,n,m,delta", 0) == 0);
}
