#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qbagents/agreement.hpp"
#include "qbagents/batch.hpp"
#include "qbagents/errors.hpp"
#include "qbagents/scenario.hpp"
#include "qbagents/trace_io.hpp"

using namespace qbagents;
using nlohmann::json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitTerminated = 3;

int fail(const std::string& kind, const std::string& message, const std::vector<std::string>& violations = {}) {
  json j = {{"error", kind}, {"message", message}};
  if (!violations.empty()) j["violations"] = violations;
  std::cerr << j.dump() << std::endl;
  return kind == "config_error" || kind == "usage_error" ? kExitConfig : kExitRuntime;
}

// A path to a JSON config, or a registry id for its default config.
ScenarioConfig load_config(const std::string& arg) {
  std::ifstream in(arg);
  if (!in) {
    if (is_known_scenario(arg) && arg != "custom") return default_config(arg);
    throw ConfigError({"cannot read config '" + arg + "' and it is not a registry id"});
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

struct Overrides {
  long long seed = -1;
  long long steps = -1;
  std::string output_dir;
};

void apply(ScenarioConfig& cfg, const Overrides& o) {
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  if (o.steps >= 0) {
    cfg.n_steps = o.steps;
    std::erase_if(cfg.snapshot_steps, [&](long long s) { return s > o.steps; });
  }
  if (!o.output_dir.empty()) cfg.output_dir = o.output_dir;
  if (auto errs = validate_config(cfg); !errs.empty()) throw ConfigError(errs);
}

int cmd_run(const std::string& path, const Overrides& o, bool plots) {
  ScenarioConfig cfg = load_config(path);
  apply(cfg, o);
  const auto t0 = std::chrono::steady_clock::now();
  const Trace trace = run_scenario(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const OutputPaths paths = output_paths(resolve_output_dir(cfg.output_dir), cfg.scenario, cfg.seed);
  emit_trace(trace, paths);
  if (plots) emit_plot_data(trace, paths);
  json j = {{"scenario", trace.scenario}, {"seed", trace.seed},       {"status", trace.status},
            {"steps", trace.records.empty() ? 0 : trace.records.back().step},
            {"output", paths.dir.string()}, {"seconds", secs}};
  if (trace.status != "completed") j["message"] = trace.message;
  std::cout << j.dump() << std::endl;
  return trace.status == "completed" ? 0 : kExitTerminated;
}

int cmd_batch(const std::string& path, const Overrides& o, long long seeds, unsigned threads) {
  ScenarioConfig cfg = load_config(path);
  apply(cfg, o);
  const BatchSummary s = run_batch(cfg, seeds, threads);
  const std::filesystem::path dir = resolve_output_dir(cfg.output_dir) /
                                    (cfg.scenario + "_batch_seed" + std::to_string(cfg.seed) + "_n" +
                                     std::to_string(seeds));
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "batch.json") << batch_json(s);
  std::printf("%-32s %8s %14s %14s %14s\n", "metric", "step", "q25", "median", "q75");
  long long last = -1;
  for (const auto& a : s.aggregates) last = std::max(last, a.step);
  for (const auto& a : s.aggregates)
    if (a.step == last || a.step == std::min<long long>(10, last))
      std::printf("%-32s %8lld %14.6g %14.6g %14.6g\n", a.metric.c_str(), a.step, a.q25, a.median, a.q75);
  std::printf("completed %zu, terminated %zu, errors %zu; written to %s\n", s.completed, s.terminated, s.errors,
              dir.string().c_str());
  return s.errors == 0 ? 0 : kExitRuntime;
}

int cmd_verify(const AppendixConfig& cfg) {
  const auto rows = verify_appendix(cfg);
  bool ok = true;
  std::printf("%-48s %10s %14s %10s  %s\n", "check", "cases", "worst", "tol", "result");
  for (const auto& r : rows) {
    std::printf("%-48s %10lld %14.6e %10.0e  %s\n", r.name.c_str(), r.cases, r.worst, r.tolerance,
                r.pass ? "PASS" : "FAIL");
    ok = ok && r.pass;
  }
  return ok ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rational-agent simulator: tomography, interacting agents, agreement checks"};
  app.require_subcommand(1);

  Overrides over;
  std::string config;
  bool no_plots = false;
  auto* run = app.add_subcommand("run", "run one scenario and write trace, summary and plot data");
  run->add_option("config", config, "config file or registry id")->required();
  run->add_option("--seed", over.seed, "override the seed");
  run->add_option("--steps", over.steps, "override n_steps");
  run->add_option("--output-dir", over.output_dir, "override output_dir");
  run->add_flag("--no-plots", no_plots, "skip plot-data files");

  long long seeds = 1;
  unsigned threads = 1;
  auto* batch = app.add_subcommand("batch", "run seeds master..master+n-1 and aggregate metrics");
  batch->add_option("config", config, "config file or registry id")->required();
  batch->add_option("--seeds", seeds, "number of seeds")->required()->check(CLI::PositiveNumber);
  batch->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  batch->add_option("--seed", over.seed, "override the master seed");
  batch->add_option("--steps", over.steps, "override n_steps");
  batch->add_option("--output-dir", over.output_dir, "override output_dir");

  AppendixConfig acfg;
  auto* verify = app.add_subcommand("verify-appendix", "numerical checks of the agreement theorems");
  verify->add_option("--chi-max-n", acfg.chi_max_n);
  verify->add_option("--kolmogorov-max-n", acfg.kolmogorov_max_n);
  verify->add_option("--pairs", acfg.random_pairs);
  verify->add_option("--scan", acfg.scan_points);

  auto* list = app.add_subcommand("list-scenarios", "print the scenario registry");

  std::string id;
  auto* defaults = app.add_subcommand("default-config", "print a registry scenario's default config");
  defaults->add_option("id", id)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage_error", e.what());
  }

  try {
    if (*run) return cmd_run(config, over, !no_plots);
    if (*batch) return cmd_batch(config, over, seeds, threads);
    if (*verify) return cmd_verify(acfg);
    if (*list) {
      for (const auto& s : scenario_registry()) std::printf("%-22s %s\n", s.id.c_str(), s.description.c_str());
      return 0;
    }
    if (*defaults) {
      std::cout << emit_config(default_config(id)) << std::endl;
      return 0;
    }
  } catch (const ConfigError& e) {
    return fail(e.kind(), e.what(), e.violations());
  } catch (const Error& e) {
    return fail(e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail("error", e.what());
  }
  return 0;
}
