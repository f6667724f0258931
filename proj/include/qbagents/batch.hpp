#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qbagents/scenario.hpp"

namespace qbagents {

/// Metric values keyed by name ("mean_gap", "<agent>.semi_major", ...).
using MetricMap = std::map<std::string, double>;

struct SeedResult {
  std::uint64_t seed = 0;
  /// completed | terminated | error
  std::string status;
  std::string message;
  /// step -> metrics, at the summary cadence and at the last recorded step.
  std::map<long long, MetricMap> checkpoints;
  long long last_step = -1;
};

struct Aggregate {
  long long step = 0;
  std::string metric;
  std::size_t n = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

struct BatchSummary {
  std::string scenario;
  std::uint64_t master_seed = 0;
  std::vector<SeedResult> runs;
  std::vector<Aggregate> aggregates;
  std::size_t completed = 0;
  std::size_t terminated = 0;
  std::size_t errors = 0;
};

/// Checkpoint metrics of one trace.
SeedResult seed_result(const Trace& trace);

/// Runs seeds master, master+1, ..., master+n-1. Per-seed errors are recorded
/// and do not stop the batch.
BatchSummary run_batch(const ScenarioConfig& base, long long n_seeds, unsigned threads = 1);

/// Linear-interpolation quantile of the non-NaN values; NaN if there are none.
double quantile(std::vector<double> values, double q);

std::string batch_json(const BatchSummary& summary);

}  // namespace qbagents
