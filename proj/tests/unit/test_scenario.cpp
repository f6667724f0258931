#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qbagents/batch.hpp"
#include "qbagents/errors.hpp"
#include "qbagents/scenario.hpp"
#include "qbagents/trace_io.hpp"

using namespace qbagents;
using doctest::Approx;

namespace {

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("registry defaults round-trip through JSON") {
  REQUIRE(scenario_registry().size() == 9);
  for (const auto& info : scenario_registry()) {
    INFO(info.id);
    const ScenarioConfig c = default_config(info.id);
    CHECK(validate_config(c).empty());
    const ScenarioConfig back = parse_config(emit_config(c));
    CHECK(back == c);
    CHECK(emit_config(back) == emit_config(c));
  }
  CHECK_FALSE(is_known_scenario("nope"));
  CHECK_THROWS_AS(default_config("nope"), ConfigError);
}

TEST_CASE("config rejections") {
  SUBCASE("quantum agent with N = 2") {
    ScenarioConfig c = default_config("quantum_pair_flat");
    c.agents[0].n_outcomes = 2;
    const auto v = violations_of(emit_config(c));
    CHECK(mentions(v, "N=2 is not the square of an integer"));
  }
  SUBCASE("Clara without support restriction") {
    ScenarioConfig c = default_config("quinn_clara_pauli");
    for (auto& a : c.agents)
      if (a.postulate == "classical") a.regularization = "none";
    CHECK(mentions(violations_of(emit_config(c)), "Bloch ball"));
  }
  SUBCASE("Clara with atoms outside the ball") {
    ScenarioConfig c = default_config("quinn_clara_pauli");
    for (auto& a : c.agents)
      if (a.postulate == "classical") {
        a.prior.kind = "atoms";
        a.prior.representation = "atoms";
        a.prior.points = {{0, 0, 0}, {0.9, 0.9, 0}};
        a.prior.weights = {0.5, 0.5};
      }
    CHECK_FALSE(violations_of(emit_config(c)).empty());
  }
  SUBCASE("unknown scenario, unknown key and a bad type are all reported") {
    nlohmann::json j = nlohmann::json::parse(emit_config(default_config("coin_tomography")));
    j["scenario"] = "nope";
    j["bogus"] = 1;
    j["n_steps"] = "many";
    const auto v = violations_of(j.dump());
    CHECK(v.size() >= 3);
    CHECK(mentions(v, "nope"));
    CHECK(mentions(v, "bogus"));
    CHECK(mentions(v, "n_steps"));
  }
  SUBCASE("malformed JSON") { CHECK_THROWS_AS(parse_config("{"), ConfigError); }
  SUBCASE("columns must sum to one") {
    ScenarioConfig c = default_config("classical_pair");
    c.agents[0].menu[0].kind = "matrix";
    c.agents[0].menu[0].rows = {{0.5, 0.5}, {0.4, 0.5}};
    CHECK_FALSE(validate_config(c).empty());
  }
  SUBCASE("source scenarios take one agent") {
    ScenarioConfig c = default_config("coin_tomography");
    c.agents.push_back(c.agents[0]);
    c.agents[1].id = "other";
    CHECK_FALSE(validate_config(c).empty());
  }
}

TEST_CASE("traces are deterministic in the seed") {
  ScenarioConfig c = default_config("quantum_pair_biasedZ");
  c.n_steps = 30;
  c.snapshot_steps = {0, 30};
  const Trace a = run_scenario(c), b = run_scenario(c);
  CHECK(trace_csv(a) == trace_csv(b));
  CHECK(summary_json(a) == summary_json(b));
  CHECK(clouds_csv(a) == clouds_csv(b));
  c.seed += 1;
  CHECK(trace_csv(run_scenario(c)) != trace_csv(a));
}

TEST_CASE("empty trace gives header-only CSV files") {
  Trace t;
  t.scenario = "custom";
  CHECK(count_lines(trace_csv(t)) == 1);
  CHECK(count_lines(curves_csv(t)) == 1);
  CHECK(count_lines(series_csv(t)) == 1);
  CHECK(count_lines(clouds_csv(t)) == 1);
  CHECK(count_lines(ellipsoids_csv(t)) == 1);
  CHECK(trace_csv(t).rfind("step,agent,action,outcome,mean_0", 0) == 0);
}

TEST_CASE("coin posterior curves are normalized densities") {
  const Trace t = run_scenario(default_config("coin_tomography"));
  REQUIRE(t.snapshots.size() == 4);
  for (const auto& s : t.snapshots) {
    INFO(s.step);
    REQUIRE(s.theta.size() > 1);
    double area = 0.0;
    for (std::size_t i = 1; i < s.theta.size(); ++i)
      area += 0.5 * (s.density[i] + s.density[i - 1]) * (s.theta[i] - s.theta[i - 1]);
    CHECK(area == Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("summary output") {
  ScenarioConfig c = default_config("qubit_tomography");
  c.n_steps = 25;
  c.snapshot_steps = {25};
  const Trace t = run_scenario(c);
  const auto j = nlohmann::json::parse(summary_json(t));
  CHECK(j["scenario"] == "qubit_tomography");
  CHECK(j["status"] == "completed");
  CHECK(j["agents"].size() == 1);
  CHECK(j["agents"][0]["mean"].size() == 3);
  CHECK(parse_config(j["config"].dump()) == c);

  // Ellipsoid rows at steps 0, 10, 20 and the last step: three axes each.
  std::istringstream in(ellipsoids_csv(t));
  std::string line;
  std::getline(in, line);
  std::set<long long> steps;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    steps.insert(std::stoll(line.substr(0, line.find(','))));
    ++rows;
  }
  CHECK(steps == std::set<long long>{0, 10, 20, 25});
  CHECK(rows == 12);
}

TEST_CASE("a one-seed batch reproduces the single run") {
  ScenarioConfig c = default_config("classical_pair");
  c.n_steps = 50;
  c.snapshot_steps = {};
  const BatchSummary b = run_batch(c, 1, 1);
  REQUIRE(b.runs.size() == 1);
  CHECK(b.completed == 1);
  const SeedResult single = seed_result(run_scenario(c));
  // NaN marks metrics that do not apply (no source in a pair run).
  REQUIRE(b.runs[0].checkpoints.size() == single.checkpoints.size());
  for (const auto& [step, m] : single.checkpoints) {
    const MetricMap& o = b.runs[0].checkpoints.at(step);
    REQUIRE(o.size() == m.size());
    for (const auto& [k, v] : m) CHECK((std::isnan(v) ? std::isnan(o.at(k)) : o.at(k) == v));
  }
  for (const auto& a : b.aggregates) {
    CHECK(a.n == 1);
    CHECK(a.q25 == a.median);
    CHECK(a.q75 == a.median);
  }
}

TEST_CASE("batch quantiles and seed spreading") {
  CHECK(quantile({1, 2, 3, 4}, 0.5) == Approx(2.5));
  CHECK(quantile({4, 1, 3, 2}, 0.25) == Approx(1.75));
  CHECK(std::isnan(quantile({}, 0.5)));
  ScenarioConfig c = default_config("classical_disjoint");
  c.n_steps = 10;
  c.snapshot_steps = {};
  const BatchSummary b = run_batch(c, 4, 2);
  REQUIRE(b.runs.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(b.runs[i].seed == c.seed + i);
}

TEST_CASE("output directory override") {
  const auto tmp = std::filesystem::temp_directory_path() / "qbagents_test_out";
  std::filesystem::remove_all(tmp);
  ::setenv(kOutputDirEnv, tmp.c_str(), 1);
  CHECK(resolve_output_dir("elsewhere") == tmp);
  ::unsetenv(kOutputDirEnv);
  CHECK(resolve_output_dir("elsewhere") == std::filesystem::path("elsewhere"));

  ScenarioConfig c = default_config("classical_disjoint");
  c.n_steps = 5;
  c.snapshot_steps = {5};
  const Trace t = run_scenario(c);
  const OutputPaths p = output_paths(tmp, t.scenario, t.seed);
  emit_trace(t, p);
  emit_plot_data(t, p);
  CHECK(p.dir == tmp / "classical_disjoint_seed42");
  for (const auto& f : {p.trace_csv, p.summary_json, p.curves_csv, p.series_csv, p.clouds_csv, p.ellipsoids_csv})
    CHECK(std::filesystem::exists(f));
  std::ifstream in(p.trace_csv);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == trace_csv(t));
  std::filesystem::remove_all(tmp);
}
