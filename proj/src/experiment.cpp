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

#include "wnll/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "wnll/graph.hpp"
#include "wnll/neighbor_index.hpp"

namespace wnll {

std::string to_string(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::kConvergence: return "convergence";
    case ExperimentMode::kMuStudy: return "mu_study";
    case ExperimentMode::kLabelRate: return "label_rate";
    case ExperimentMode::kDiscrepancy: return "discrepancy";
    case ExperimentMode::kConsistency: return "consistency";
  }
  return "";
}

ExperimentMode parse_experiment_mode(std::string_view name) {
  for (auto m : {ExperimentMode::kConvergence, ExperimentMode::kMuStudy, ExperimentMode::kLabelRate,
                 ExperimentMode::kDiscrepancy, ExperimentMode::kConsistency})
    if (to_string(m) == name) return m;
  throw InvalidArgument("unknown mode '" + std::string(name) + "'");
}

std::vector<double> DeltaRule::deltas_for(std::size_t n, int k) const {
  if (kind == Kind::kFixedList) return values;
  const double e = exponent.value_or(coupling_exponent(k));
  return {a * std::pow(static_cast<double>(n), -e)};
}

double MuRule::mu_for(std::size_t unlabeled, std::size_t labeled) const {
  switch (kind) {
    case Kind::kDefaultRatio: return default_mu(unlabeled, labeled);
    case Kind::kFixed: return value;
    case Kind::kElEquivalent: return (default_mu(unlabeled, labeled) + 2.0) / 2.0;
  }
  return 0.0;
}

namespace {

const std::set<std::string> kConfigKeys{"mode",         "manifold",   "region",          "label_fn",  "sampling",
                                        "n_ladder",     "m",          "label_counts",    "mu_values", "delta_rule",
                                        "mu_rule",      "profile",    "seeds",           "solver",    "c_margin",
                                        "reference",    "compute_errors", "discrepancy", "queries",   "output"};

void reject_unknown(const Json& j, const std::set<std::string>& keys, const std::string& where) {
  for (const auto& [key, value] : j.items())
    if (!keys.count(key)) throw InvalidArgument("unknown key '" + key + "' in " + where);
}

std::string delta_kind_name(DeltaRule::Kind k) { return k == DeltaRule::Kind::kFixedList ? "fixed_list" : "power_of_n"; }

std::string mu_kind_name(MuRule::Kind k) {
  switch (k) {
    case MuRule::Kind::kDefaultRatio: return "default_ratio";
    case MuRule::Kind::kFixed: return "fixed";
    case MuRule::Kind::kElEquivalent: return "el_equivalent";
  }
  return "";
}

ExperimentConfig parse_config(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  reject_unknown(j, kConfigKeys, "config");
  ExperimentConfig c;
  c.mode = parse_experiment_mode(j.at("mode").get<std::string>());
  c.manifold = manifold_from_json(j.at("manifold"));
  if (j.contains("region")) c.region = region_from_json(j.at("region"), c.manifold);
  else if (c.mode != ExperimentMode::kDiscrepancy) throw InvalidArgument("config needs a region");
  else c.region.manifold = c.manifold;
  if (j.contains("label_fn")) c.label_fn = label_function_from_json(j.at("label_fn"));
  c.sampling = parse_sampling_mode(j.value("sampling", std::string("quasi_uniform")));
  c.n_ladder = j.at("n_ladder").get<std::vector<std::size_t>>();
  c.m = j.value("m", std::size_t{0});
  c.label_counts = j.value("label_counts", std::vector<std::size_t>{});
  c.mu_values = j.value("mu_values", std::vector<double>{});

  const Json& d = j.at("delta_rule");
  reject_unknown(d, {"kind", "values", "a", "exponent", "enforce_coupling"}, "delta_rule");
  const auto dkind = d.at("kind").get<std::string>();
  if (dkind == "fixed_list") {
    c.delta_rule.kind = DeltaRule::Kind::kFixedList;
    c.delta_rule.values = d.at("values").get<std::vector<double>>();
  } else if (dkind == "power_of_n") {
    c.delta_rule.kind = DeltaRule::Kind::kPowerOfN;
    c.delta_rule.a = d.value("a", 1.0);
    if (d.contains("exponent")) c.delta_rule.exponent = d.at("exponent").get<double>();
    c.delta_rule.enforce_coupling = d.value("enforce_coupling", false);
  } else {
    throw InvalidArgument("unknown delta_rule kind '" + dkind + "'");
  }

  if (j.contains("mu_rule")) {
    const Json& mu = j.at("mu_rule");
    reject_unknown(mu, {"kind", "value"}, "mu_rule");
    const auto kind = mu.at("kind").get<std::string>();
    if (kind == "default_ratio") c.mu_rule.kind = MuRule::Kind::kDefaultRatio;
    else if (kind == "fixed") {
      c.mu_rule.kind = MuRule::Kind::kFixed;
      c.mu_rule.value = mu.at("value").get<double>();
    } else if (kind == "el_equivalent") c.mu_rule.kind = MuRule::Kind::kElEquivalent;
    else throw InvalidArgument("unknown mu_rule kind '" + kind + "'");
  }
  c.profile = j.value("profile", c.profile);
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("solver")) {
    const Json& s = j.at("solver");
    reject_unknown(s, {"method", "tol", "max_iter"}, "solver");
    c.solver.method = parse_solve_method(s.value("method", std::string("cg")));
    c.solver.tol = s.value("tol", c.solver.tol);
    c.solver.max_iter = s.value("max_iter", std::size_t{0});
  }
  c.c_margin = j.value("c_margin", 1.0);
  if (j.contains("reference")) {
    const Json& r = j.at("reference");
    reject_unknown(r, {"resolution", "tolerance", "max_resolution"}, "reference");
    c.reference.resolution = r.value("resolution", c.reference.resolution);
    c.reference.tolerance = r.value("tolerance", c.reference.tolerance);
    c.reference.max_resolution = r.value("max_resolution", c.reference.max_resolution);
  }
  c.compute_errors = j.value("compute_errors", true);
  if (j.contains("discrepancy")) {
    reject_unknown(j.at("discrepancy"), {"centers_per_dim"}, "discrepancy");
    c.centers_per_dim = j.at("discrepancy").value("centers_per_dim", c.centers_per_dim);
  }
  if (j.contains("queries")) {
    for (const auto& q : j.at("queries")) {
      const auto v = q.get<std::vector<double>>();
      if (v.empty() || v.size() > 2) throw InvalidArgument("queries are one or two intrinsic coordinates");
      c.queries.push_back({v[0], v.size() > 1 ? v[1] : 0.0});
    }
  }
  c.output = j.value("output", std::string());
  c.validate();
  return c;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  try {
    return parse_config(j);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
}

void ExperimentConfig::validate() const {
  manifold.validate();
  const int k = manifold.intrinsic_dim();
  if (!(region.manifold == manifold)) throw InvalidArgument("region belongs to a different manifold");
  if (mode != ExperimentMode::kDiscrepancy) {
    region.validate();
    label_fn.check_defined(manifold);
  }
  if (n_ladder.empty()) throw InvalidArgument("n_ladder is empty");
  for (std::size_t i = 0; i < n_ladder.size(); ++i) {
    if (n_ladder[i] == 0) throw InvalidArgument("n_ladder entries must be positive");
    if (i > 0 && n_ladder[i] <= n_ladder[i - 1]) throw InvalidArgument("n_ladder must be strictly increasing");
  }
  if (seeds.empty()) throw InvalidArgument("seeds is empty");
  if (delta_rule.kind == DeltaRule::Kind::kFixedList) {
    if (delta_rule.values.empty()) throw InvalidArgument("delta_rule values are empty");
    for (double d : delta_rule.values)
      if (!(d > 0.0 && d < manifold.scale)) throw InvalidArgument("delta must lie in (0, scale)");
  } else {
    if (!(delta_rule.a > 0.0)) throw InvalidArgument("power_of_n needs a > 0");
    const double e = delta_rule.exponent.value_or(DeltaRule::coupling_exponent(k));
    if (!(e > 0.0)) throw InvalidArgument("power_of_n exponent must be positive");
    if (delta_rule.enforce_coupling && e > DeltaRule::coupling_exponent(k) * (1.0 + 1e-12))
      throw InvalidArgument("power_of_n exponent " + format_double(e) + " exceeds the coupling limit 1/(2k+6) = " +
                            format_double(DeltaRule::coupling_exponent(k)));
    for (std::size_t n : n_ladder) {
      const double d = delta_rule.deltas_for(n, k).front();
      if (!(d > 0.0 && d < manifold.scale)) throw InvalidArgument("power_of_n gives delta outside (0, scale)");
    }
    if (mode == ExperimentMode::kDiscrepancy) throw InvalidArgument("discrepancy mode needs a fixed_list delta rule");
  }
  make_profile(profile, 0.1, k);
  if (!(solver.tol > 0.0)) throw InvalidArgument("solver tol must be positive");
  if (mu_rule.kind == MuRule::Kind::kFixed && !(mu_rule.value > 0.0)) throw InvalidArgument("fixed mu must be positive");
  if (!(c_margin > 0.0)) throw InvalidArgument("c_margin must be positive");
  switch (mode) {
    case ExperimentMode::kConvergence:
      if (m == 0) throw InvalidArgument("convergence mode needs m >= 1");
      break;
    case ExperimentMode::kMuStudy:
      if (m == 0) throw InvalidArgument("mu_study mode needs m >= 1");
      if (mu_values.empty()) throw InvalidArgument("mu_study mode needs mu_values");
      for (double mu : mu_values)
        if (!(mu >= 0.0) || !std::isfinite(mu)) throw InvalidArgument("mu values must be finite and nonnegative");
      break;
    case ExperimentMode::kLabelRate: {
      const auto counts = label_counts.empty() ? std::vector<std::size_t>{m} : label_counts;
      for (std::size_t mm : counts) {
        if (mm == 0) throw InvalidArgument("label counts must be positive");
        if (mm > n_ladder.front()) throw InvalidArgument("label count exceeds n");
      }
      break;
    }
    case ExperimentMode::kDiscrepancy:
      if (centers_per_dim == 0) throw InvalidArgument("centers_per_dim must be positive");
      break;
    case ExperimentMode::kConsistency:
      if (!label_fn.has_laplacian()) throw InvalidArgument("consistency mode needs a label function with a Laplacian");
      break;
  }
}

Json ExperimentConfig::to_json() const {
  Json j;
  j["mode"] = to_string(mode);
  j["manifold"] = wnll::to_json(manifold);
  if (mode != ExperimentMode::kDiscrepancy || region.radius > 0.0) j["region"] = wnll::to_json(region);
  j["label_fn"] = wnll::to_json(label_fn);
  j["sampling"] = to_string(sampling);
  j["n_ladder"] = n_ladder;
  j["m"] = m;
  if (!label_counts.empty()) j["label_counts"] = label_counts;
  if (!mu_values.empty()) j["mu_values"] = mu_values;
  Json d{{"kind", delta_kind_name(delta_rule.kind)}};
  if (delta_rule.kind == DeltaRule::Kind::kFixedList) {
    d["values"] = delta_rule.values;
  } else {
    d["a"] = delta_rule.a;
    d["exponent"] = delta_rule.exponent.value_or(DeltaRule::coupling_exponent(manifold.intrinsic_dim()));
    d["enforce_coupling"] = delta_rule.enforce_coupling;
  }
  j["delta_rule"] = d;
  Json mu{{"kind", mu_kind_name(mu_rule.kind)}};
  if (mu_rule.kind == MuRule::Kind::kFixed) mu["value"] = mu_rule.value;
  j["mu_rule"] = mu;
  j["profile"] = profile;
  j["seeds"] = seeds;
  j["solver"] = {{"method", to_string(solver.method)}, {"tol", solver.tol}, {"max_iter", solver.max_iter}};
  j["c_margin"] = c_margin;
  j["reference"] = {{"resolution", reference.resolution},
                    {"tolerance", reference.tolerance},
                    {"max_resolution", reference.max_resolution}};
  j["compute_errors"] = compute_errors;
  j["discrepancy"] = {{"centers_per_dim", centers_per_dim}};
  if (!queries.empty()) {
    Json q = Json::array();
    for (const auto& t : queries) q.push_back(manifold.intrinsic_dim() == 1 ? Json::array({t[0]}) : Json::array({t[0], t[1]}));
    j["queries"] = q;
  }
  if (!output.empty()) j["output"] = output;
  return j;
}

double jump_metric(const PointList& unlabeled, const std::vector<double>& u, const LabeledSet& labeled, double radius,
                   int ambient_dim) {
  if (unlabeled.empty() || labeled.size() == 0) return 0.0;
  const NeighborIndex index(unlabeled, radius, ambient_dim);
  double j = 0.0;
  for (std::size_t s = 0; s < labeled.size(); ++s) {
    std::int64_t best = -1;
    double best_d2 = 0.0;
    for (std::uint32_t p : index.query(labeled.points[s], radius)) {
      const double d2 = squared_distance(labeled.points[s], unlabeled[p]);
      if (best < 0 || d2 < best_d2) {
        best = p;
        best_d2 = d2;
      }
    }
    if (best >= 0) j = std::max(j, std::abs(u[static_cast<std::size_t>(best)] - labeled.values[s]));
  }
  return j;
}

std::vector<SlopeFit> fit_slopes(const std::vector<RunRow>& rows, bool group_by_n) {
  using Key = std::tuple<std::uint64_t, std::string, std::size_t>;
  std::vector<Key> order;
  std::map<Key, std::vector<const RunRow*>> groups;
  for (const RunRow& r : rows) {
    const Key key{r.seed, r.method, group_by_n ? r.n : 0};
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<SlopeFit> out;
  for (const Key& key : order) {
    for (const std::string metric : {"err_max", "err_l2"}) {
      std::vector<double> xs, ys;
      for (const RunRow* r : groups[key]) {
        const auto& v = metric == "err_max" ? r->err_max : r->err_l2;
        if (v && *v > 0.0) {
          xs.push_back(r->delta);
          ys.push_back(*v);
        }
      }
      if (xs.size() < 2 || std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); })) continue;
      SlopeFit f;
      f.seed = std::get<0>(key);
      f.method = std::get<1>(key);
      if (group_by_n) f.n = std::get<2>(key);
      f.metric = metric;
      f.points = xs.size();
      f.fit = fit_loglog(xs, ys);
      out.push_back(f);
    }
  }
  return out;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

struct Instance {
  PointCloud cloud;
  LabeledSet labeled;
  std::vector<double> reference;  // empty when errors are off
};

Instance make_instance(const ExperimentConfig& c, std::uint64_t seed, std::size_t unlabeled, std::size_t m) {
  Instance inst;
  // Everything labeled leaves P empty.
  inst.cloud = unlabeled > 0 ? sample_manifold(c.manifold, unlabeled, seed, c.sampling)
                             : PointCloud{c.manifold, {}, seed, c.sampling};
  inst.labeled = sample_labeled(c.region, m, seed, c.label_fn);
  if (c.compute_errors && unlabeled > 0)
    inst.reference = reference_harmonic_solution(c.region, c.label_fn, inst.cloud.points, c.reference);
  return inst;
}

// Assembles, checks and (when possible) solves one system; appends one row per method.
void run_one(const ExperimentConfig& c, const Instance& inst, std::uint64_t seed, std::size_t n_row, double delta,
             double mu, bool with_gl, std::vector<RunRow>& rows) {
  const auto start = std::chrono::steady_clock::now();
  const KernelProfile profile = make_profile(c.profile, delta, c.manifold.intrinsic_dim());
  const AffinityGraph graph = AffinityGraph::assemble(inst.cloud, inst.labeled, profile);
  const ConnectivityReport conn = check_s_connected(graph);
  const ConditionReport cond = check_mu_condition(graph, c.region, delta, mu, c.c_margin);
  const double setup = seconds_since(start);

  auto base_row = [&](const std::string& method, double mu_used) {
    RunRow r;
    r.seed = seed;
    r.n = n_row;
    r.m = inst.labeled.size();
    r.delta = delta;
    r.mu = mu_used;
    r.method = method;
    r.connected = conn.s_connected;
    r.unreachable = conn.unreachable.size();
    if (!cond.vacuous) r.mu_margin = cond.min_ratio;
    return r;
  };

  auto solve_row = [&](const std::string& method, double mu_used, const LinearSystem* sys) {
    RunRow r = base_row(method, mu_used);
    const auto t = std::chrono::steady_clock::now();
    if (inst.cloud.size() == 0) {
      r.jump = 0.0;
      if (c.compute_errors) r.err_max = r.err_l2 = 0.0;
      r.residual = 0.0;
      r.converged = true;
      r.wall_time = setup;
      rows.push_back(r);
      return;
    }
    if (!conn.s_connected || sys == nullptr) {
      r.wall_time = setup + seconds_since(t);
      rows.push_back(r);
      return;
    }
    const Solution sol = solve(*sys, c.solver);
    r.iterations = sol.stats.iterations;
    r.residual = sol.stats.final_residual;
    r.converged = sol.stats.converged;
    r.jump = jump_metric(inst.cloud.points, sol.values, inst.labeled, profile.k_support_radius(),
                         c.manifold.ambient_dim());
    if (c.compute_errors) {
      double emax = 0.0, sum2 = 0.0;
      for (std::size_t i = 0; i < sol.values.size(); ++i) {
        const double e = std::abs(sol.values[i] - inst.reference[i]);
        emax = std::max(emax, e);
        sum2 += e * e;
      }
      r.err_max = emax;
      r.err_l2 = sol.values.empty() ? 0.0 : std::sqrt(sum2 / static_cast<double>(sol.values.size()));
    }
    r.wall_time = setup + seconds_since(t);
    rows.push_back(r);
  };

  if (mu > 0.0) {
    const LinearSystem sys = assemble_wnll(graph, inst.labeled, mu);
    solve_row("wnll", mu, &sys);
  } else {
    solve_row("wnll", mu, nullptr);
  }
  if (with_gl) {
    const LinearSystem gl = assemble_graph_laplacian(graph, inst.labeled);
    solve_row("gl", 1.0, &gl);
  }
}

PointList auto_queries(const ExperimentConfig& c, double delta_max) {
  const std::size_t per_dim = c.manifold.intrinsic_dim() == 1 ? 64 : 16;
  PointList all = discrepancy_centers(c.manifold, per_dim), kept;
  for (const Point& p : all)
    if (geodesic_distance_to_region(c.region, p) > 2.0 * delta_max * (1.0 + 1e-9)) kept.push_back(p);
  if (kept.empty()) throw InvalidArgument("no consistency query lies farther than 2 delta from the region");
  PointList out;
  const std::size_t stride = (kept.size() + 15) / 16;
  for (std::size_t i = 0; i < kept.size(); i += stride) out.push_back(kept[i]);
  return out;
}

Json optional_json(const std::optional<double>& v) { return v && std::isfinite(*v) ? Json(*v) : Json(nullptr); }

std::optional<double> optional_from(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

Report run_experiment(const ExperimentConfig& c) {
  c.validate();
  const auto start = std::chrono::steady_clock::now();
  Report report;
  report.config = c.to_json();
  report.mode = c.mode;
  const int k = c.manifold.intrinsic_dim();

  switch (c.mode) {
    case ExperimentMode::kConvergence:
    case ExperimentMode::kMuStudy: {
      for (std::uint64_t seed : c.seeds) {
        for (std::size_t n : c.n_ladder) {
          const Instance inst = make_instance(c, seed, n, c.m);
          for (double delta : c.delta_rule.deltas_for(n, k)) {
            if (c.mode == ExperimentMode::kConvergence) {
              run_one(c, inst, seed, n, delta, c.mu_rule.mu_for(n, c.m), false, report.rows);
            } else {
              for (double mu : c.mu_values) run_one(c, inst, seed, n, delta, mu, false, report.rows);
            }
          }
        }
      }
      if (c.mode == ExperimentMode::kConvergence) {
        report.slopes = fit_slopes(report.rows, c.delta_rule.kind == DeltaRule::Kind::kFixedList);
        Json med = Json::object();
        for (const std::string metric : {"err_max", "err_l2"}) {
          std::vector<double> s;
          for (const auto& f : report.slopes)
            if (f.metric == metric) s.push_back(f.fit.slope);
          med[metric] = s.empty() ? Json(nullptr) : Json(median(s));
        }
        report.summary["median_slope"] = med;
      }
      break;
    }
    case ExperimentMode::kLabelRate: {
      const auto counts = c.label_counts.empty() ? std::vector<std::size_t>{c.m} : c.label_counts;
      for (std::uint64_t seed : c.seeds)
        for (std::size_t n : c.n_ladder)
          for (std::size_t m : counts) {
            if (m > n) throw InvalidArgument("label count exceeds n");
            const Instance inst = make_instance(c, seed, n - m, m);
            for (double delta : c.delta_rule.deltas_for(n, k))
              run_one(c, inst, seed, n, delta, c.mu_rule.mu_for(n - m, m), true, report.rows);
          }
      // Mean over seeds of J_GL / J_WNLL per (n, m, delta).
      Json ratios = Json::array();
      std::map<std::tuple<std::size_t, std::size_t, double>, std::vector<double>> by_key;
      std::vector<std::tuple<std::size_t, std::size_t, double>> order;
      for (std::size_t i = 0; i + 1 < report.rows.size(); i += 2) {
        const RunRow& w = report.rows[i];
        const RunRow& g = report.rows[i + 1];
        const auto key = std::make_tuple(w.n, w.m, w.delta);
        if (!by_key.count(key)) order.push_back(key);
        auto& v = by_key[key];
        if (w.jump && g.jump && *w.jump > 0.0) v.push_back(*g.jump / *w.jump);
      }
      for (const auto& key : order) {
        const auto& v = by_key[key];
        double mean = 0.0;
        for (double x : v) mean += x;
        ratios.push_back({{"n", std::get<0>(key)},
                          {"m", std::get<1>(key)},
                          {"delta", std::get<2>(key)},
                          {"per_seed", v},
                          {"mean_ratio", v.empty() ? Json(nullptr) : Json(mean / static_cast<double>(v.size()))}});
      }
      report.summary["jump_ratio_gl_over_wnll"] = ratios;
      break;
    }
    case ExperimentMode::kDiscrepancy: {
      Json studies = Json::array();
      for (double delta : c.delta_rule.values) {
        const KernelProfile profile = make_profile(c.profile, delta, k);
        const DiscrepancyStudy st = discrepancy_study(c.manifold, profile, c.n_ladder, c.seeds, c.sampling, c.centers_per_dim);
        report.discrepancy_rows.insert(report.discrepancy_rows.end(), st.rows.begin(), st.rows.end());
        studies.push_back({{"delta", delta},
                           {"c_star", st.c_star},
                           {"exponent", st.rows.size() >= 2 ? Json(st.exponent.slope) : Json(nullptr)},
                           {"exponent_stderr", optional_json(st.exponent.slope_stderr)},
                           {"bound_dominates", st.bound_dominates}});
      }
      report.summary["studies"] = studies;
      break;
    }
    case ExperimentMode::kConsistency: {
      Json orders = Json::array();
      for (std::uint64_t seed : c.seeds) {
        for (std::size_t n : c.n_ladder) {
          const auto deltas = c.delta_rule.deltas_for(n, k);
          PointList queries;
          if (c.queries.empty()) {
            queries = auto_queries(c, *std::max_element(deltas.begin(), deltas.end()));
          } else {
            for (const auto& t : c.queries) queries.push_back(c.manifold.embed(t));
          }
          const PointCloud cloud = sample_manifold(c.manifold, n, seed, c.sampling);
          const KernelProfile profile = make_profile(c.profile, deltas.front(), k);
          const ConsistencyStudy st = consistency_study(cloud, profile, deltas, c.label_fn, queries, c.region);
          for (const auto& level : st.levels)
            report.consistency_rows.push_back({seed, n, level.delta, level.max_residual, queries.size()});
          orders.push_back({{"seed", seed},
                            {"n", n},
                            {"order", deltas.size() >= 2 ? Json(st.order.slope) : Json(nullptr)},
                            {"order_stderr", optional_json(st.order.slope_stderr)}});
        }
      }
      report.summary["orders"] = orders;
      break;
    }
  }
  report.wall_time = seconds_since(start);
  return report;
}

Json Report::to_json() const {
  Json j;
  j["mode"] = wnll::to_string(mode);
  j["config"] = config;
  Json rs = Json::array();
  for (const RunRow& r : rows) {
    rs.push_back({{"seed", r.seed},
                  {"n", r.n},
                  {"m", r.m},
                  {"delta", r.delta},
                  {"mu", r.mu},
                  {"method", r.method},
                  {"err_max", optional_json(r.err_max)},
                  {"err_l2", optional_json(r.err_l2)},
                  {"jump", optional_json(r.jump)},
                  {"connected", r.connected},
                  {"unreachable", r.unreachable},
                  {"mu_margin", optional_json(r.mu_margin)},
                  {"iterations", r.iterations},
                  {"residual", optional_json(r.residual)},
                  {"converged", r.converged},
                  {"wall_time", r.wall_time}});
  }
  j["rows"] = rs;
  Json sl = Json::array();
  for (const SlopeFit& f : slopes) {
    sl.push_back({{"seed", f.seed},
                  {"n", f.n ? Json(*f.n) : Json(nullptr)},
                  {"method", f.method},
                  {"metric", f.metric},
                  {"points", f.points},
                  {"slope", f.fit.slope},
                  {"intercept", f.fit.intercept},
                  {"slope_stderr", optional_json(f.fit.slope_stderr)}});
  }
  j["slopes"] = sl;
  if (!discrepancy_rows.empty()) {
    Json d = Json::array();
    for (const auto& r : discrepancy_rows)
      d.push_back({{"n", r.n}, {"delta", r.delta}, {"sup_gap", r.sup_gap}, {"bound", r.bound}, {"ratio", r.ratio},
                   {"per_seed", r.per_seed}});
    j["discrepancy_rows"] = d;
  }
  if (!consistency_rows.empty()) {
    Json d = Json::array();
    for (const auto& r : consistency_rows)
      d.push_back({{"seed", r.seed}, {"n", r.n}, {"delta", r.delta}, {"max_residual", r.max_residual}, {"queries", r.queries}});
    j["consistency_rows"] = d;
  }
  j["summary"] = summary;
  j["wall_time"] = wall_time;
  return j;
}

Report Report::from_json(const Json& j) {
  try {
    Report r;
    r.mode = parse_experiment_mode(j.at("mode").get<std::string>());
    r.config = j.at("config");
    for (const Json& x : j.at("rows")) {
      RunRow row;
      row.seed = x.at("seed").get<std::uint64_t>();
      row.n = x.at("n").get<std::size_t>();
      row.m = x.at("m").get<std::size_t>();
      row.delta = x.at("delta").get<double>();
      row.mu = x.at("mu").get<double>();
      row.method = x.at("method").get<std::string>();
      row.err_max = optional_from(x, "err_max");
      row.err_l2 = optional_from(x, "err_l2");
      row.jump = optional_from(x, "jump");
      row.connected = x.at("connected").get<bool>();
      row.unreachable = x.at("unreachable").get<std::size_t>();
      row.mu_margin = optional_from(x, "mu_margin");
      row.iterations = x.at("iterations").get<std::size_t>();
      row.residual = optional_from(x, "residual");
      row.converged = x.at("converged").get<bool>();
      row.wall_time = x.value("wall_time", 0.0);
      r.rows.push_back(row);
    }
    for (const Json& x : j.at("slopes")) {
      SlopeFit f;
      f.seed = x.at("seed").get<std::uint64_t>();
      if (!x.at("n").is_null()) f.n = x.at("n").get<std::size_t>();
      f.method = x.at("method").get<std::string>();
      f.metric = x.at("metric").get<std::string>();
      f.points = x.at("points").get<std::size_t>();
      f.fit.slope = x.at("slope").get<double>();
      f.fit.intercept = x.at("intercept").get<double>();
      if (const auto se = optional_from(x, "slope_stderr")) f.fit.slope_stderr = *se;
      r.slopes.push_back(f);
    }
    if (j.contains("discrepancy_rows"))
      for (const Json& x : j.at("discrepancy_rows")) {
        DiscrepancyRow d;
        d.n = x.at("n").get<std::size_t>();
        d.delta = x.at("delta").get<double>();
        d.sup_gap = x.at("sup_gap").get<double>();
        d.bound = x.at("bound").get<double>();
        d.ratio = x.at("ratio").get<double>();
        d.per_seed = x.value("per_seed", std::vector<double>{});
        r.discrepancy_rows.push_back(d);
      }
    if (j.contains("consistency_rows"))
      for (const Json& x : j.at("consistency_rows"))
        r.consistency_rows.push_back({x.at("seed").get<std::uint64_t>(), x.at("n").get<std::size_t>(),
                                      x.at("delta").get<double>(), x.at("max_residual").get<double>(),
                                      x.at("queries").get<std::size_t>()});
    r.summary = j.value("summary", Json::object());
    r.wall_time = j.value("wall_time", 0.0);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what(), 0);
  }
}

std::string Report::to_csv() const {
  std::ostringstream out;
  auto opt = [](const std::optional<double>& v) { return v && std::isfinite(*v) ? format_double(*v) : std::string(); };
  switch (mode) {
    case ExperimentMode::kDiscrepancy:
      out << "n,delta,sup_gap,bound,ratio\n";
      for (const auto& r : discrepancy_rows)
        out << r.n << ',' << format_double(r.delta) << ',' << format_double(r.sup_gap) << ',' << format_double(r.bound)
            << ',' << format_double(r.ratio) << '\n';
      break;
    case ExperimentMode::kConsistency:
      out << "seed,n,delta,max_residual,queries\n";
      for (const auto& r : consistency_rows)
        out << r.seed << ',' << r.n << ',' << format_double(r.delta) << ',' << format_double(r.max_residual) << ','
            << r.queries << '\n';
      break;
    default:
      out << "seed,n,m,delta,mu,method,err_max,err_l2,jump,connected,unreachable,mu_margin,iterations,residual,converged\n";
      for (const RunRow& r : rows)
        out << r.seed << ',' << r.n << ',' << r.m << ',' << format_double(r.delta) << ',' << format_double(r.mu) << ','
            << r.method << ',' << opt(r.err_max) << ',' << opt(r.err_l2) << ',' << opt(r.jump) << ','
            << (r.connected ? "true" : "false") << ',' << r.unreachable << ',' << opt(r.mu_margin) << ','
            << r.iterations << ',' << opt(r.residual) << ',' << (r.converged ? "true" : "false") << '\n';
  }
  return out.str();
}

void write_report(const Report& report, const std::string& prefix) {
  write_file(prefix + ".csv", report.to_csv());
  write_file(prefix + ".json", report.to_json().dump(2) + "\n");
}

}  // namespace wnll
