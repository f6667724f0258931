#include "qbagents/batch.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include "qbagents/errors.hpp"

namespace qbagents {

SeedResult seed_result(const Trace& t) {
  SeedResult r;
  r.seed = t.seed;
  r.status = t.status;
  r.message = t.message;
  if (t.records.empty()) return r;
  r.last_step = t.records.back().step;
  const long long k = std::max<long long>(t.summary_interval, 1);
  for (const auto& rec : t.records) {
    if (rec.step % k != 0 && rec.step != r.last_step) continue;
    MetricMap m;
    m["mean_gap"] = rec.mean_gap;
    for (const auto& a : rec.agents) {
      m[a.agent + ".semi_major"] = a.axis_lengths.size() ? a.axis_lengths(0) : 0.0;
      m[a.agent + ".cov_trace"] = a.cov_trace;
      m[a.agent + ".dist_source"] = a.dist_source;
      m[a.agent + ".dist_frequency"] = a.dist_frequency;
      m[a.agent + ".outcome_frequency"] = a.outcome_frequency;
    }
    r.checkpoints[rec.step] = std::move(m);
  }
  return r;
}

double quantile(std::vector<double> v, double q) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

BatchSummary run_batch(const ScenarioConfig& base, long long n_seeds, unsigned threads) {
  if (n_seeds < 1) throw DomainError("n_seeds must be at least 1");
  BatchSummary out;
  out.scenario = base.scenario;
  out.master_seed = base.seed;
  out.runs.resize(static_cast<std::size_t>(n_seeds));

  std::atomic<long long> next{0};
  auto worker = [&] {
    for (long long i = next++; i < n_seeds; i = next++) {
      ScenarioConfig cfg = base;
      cfg.seed = base.seed + static_cast<std::uint64_t>(i);
      SeedResult& slot = out.runs[static_cast<std::size_t>(i)];
      try {
        slot = seed_result(run_scenario(cfg));
      } catch (const std::exception& e) {
        slot = SeedResult{};
        slot.seed = cfg.seed;
        slot.status = "error";
        slot.message = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_seeds)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::map<std::pair<long long, std::string>, std::vector<double>> values;
  for (const auto& r : out.runs) {
    if (r.status == "completed") ++out.completed;
    else if (r.status == "terminated") ++out.terminated;
    else ++out.errors;
    for (const auto& [step, metrics] : r.checkpoints)
      for (const auto& [name, v] : metrics) values[{step, name}].push_back(v);
  }
  for (auto& [key, v] : values) {
    Aggregate a;
    a.step = key.first;
    a.metric = key.second;
    a.n = static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](double x) { return !std::isnan(x); }));
    if (a.n == 0) continue;
    a.median = quantile(v, 0.5);
    a.q25 = quantile(v, 0.25);
    a.q75 = quantile(v, 0.75);
    out.aggregates.push_back(a);
  }
  return out;
}

std::string batch_json(const BatchSummary& s) {
  using nlohmann::json;
  json j;
  j["scenario"] = s.scenario;
  j["master_seed"] = s.master_seed;
  j["n_seeds"] = s.runs.size();
  j["completed"] = s.completed;
  j["terminated"] = s.terminated;
  j["errors"] = s.errors;
  json runs = json::array();
  for (const auto& r : s.runs) {
    json rj = {{"seed", r.seed}, {"status", r.status}, {"message", r.message}, {"last_step", r.last_step}};
    if (!r.checkpoints.empty()) {
      json fin = json::object();
      for (const auto& [name, v] : r.checkpoints.rbegin()->second) fin[name] = std::isnan(v) ? json(nullptr) : json(v);
      rj["final"] = fin;
    }
    runs.push_back(rj);
  }
  j["runs"] = runs;
  json agg = json::array();
  for (const auto& a : s.aggregates)
    agg.push_back({{"step", a.step}, {"metric", a.metric}, {"n", a.n}, {"median", a.median}, {"q25", a.q25},
                   {"q75", a.q75}});
  j["aggregates"] = agg;
  return j.dump(2);
}

}  // namespace qbagents
