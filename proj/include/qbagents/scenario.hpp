#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qbagents/interaction.hpp"

namespace qbagents {

struct PriorSpec {
  /// uniform | beta | semicircle | triangular | atoms
  std::string kind = "uniform";
  /// grid | particles | atoms
  std::string representation = "grid";
  /// Support of a uniform interval prior.
  double lo = 0.0;
  double hi = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  /// Peak of the triangular prior on [0, 1].
  double mode = 0.7;
  std::vector<std::vector<double>> points;
  std::vector<double> weights;
  long long n_particles = 10000;
  long long grid_size = 10001;

  bool operator==(const PriorSpec&) const = default;
};

struct ActionSpec {
  std::string name;
  /// pauli | sharp_pauli | sic | trivial | identity | matrix
  std::string kind;
  /// X, Y or Z for pauli and sharp_pauli.
  std::string axis;
  /// Row j, column i: R(j|i). For kind = matrix.
  std::vector<std::vector<double>> rows;
  std::vector<double> utilities;
  std::vector<std::string> labels;

  bool operator==(const ActionSpec&) const = default;
};

struct AgentSpec {
  std::string id;
  /// Defaults to id. Names the agent's random streams.
  std::string stream_key;
  /// classical | quantum_sic
  std::string postulate = "classical";
  long long n_outcomes = 2;
  /// interval | bloch | simplex
  std::string chart = "interval";
  PriorSpec prior;
  std::vector<ActionSpec> menu;
  /// none | z_projection | z_embedding | support_restriction
  std::string regularization = "none";

  bool operator==(const AgentSpec&) const = default;
};

struct SourceSpec {
  /// interval | bloch
  std::string chart = "interval";
  std::vector<double> point;

  bool operator==(const SourceSpec&) const = default;
};

struct ScenarioConfig {
  std::string scenario;
  std::uint64_t seed = 0;
  long long n_steps = 0;
  long long summary_interval = 10;
  /// expectation | prior_sampling
  std::string interaction = "expectation";
  /// simultaneous | turn_based
  std::string exchange = "simultaneous";
  std::string output_dir = "output";
  std::vector<long long> snapshot_steps;
  long long cloud_points = 2000;
  std::optional<SourceSpec> source;
  std::vector<AgentSpec> agents;

  bool operator==(const ScenarioConfig&) const = default;
};

struct ScenarioInfo {
  std::string id;
  std::string description;
};

/// The fixed registry. "custom" is also accepted by the parser for
/// hand-built configurations.
const std::vector<ScenarioInfo>& scenario_registry();
bool is_known_scenario(const std::string& id);
ScenarioConfig default_config(const std::string& id);

/// Throws ConfigError listing every violation.
ScenarioConfig parse_config(const std::string& text);
std::string emit_config(const ScenarioConfig& cfg);
std::vector<std::string> validate_config(const ScenarioConfig& cfg);

Simulation build_simulation(const ScenarioConfig& cfg);
Trace run_scenario(const ScenarioConfig& cfg);

}  // namespace qbagents
