#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qbagents/agent.hpp"
#include "qbagents/inference.hpp"
#include "qbagents/rng.hpp"

namespace qbagents {

/// How a receiver turns a broadcast parameter into its own reference probabilities.
enum class Regularization {
  None,
  /// Qubit broadcast -> Pauli-Z Born probabilities ((1+z)/2, (1-z)/2).
  ZProjection,
  /// theta -> diag(theta, 1 - theta), the Bloch point (0, 0, 2 theta - 1).
  ZEmbedding,
  /// Receiver's prior was restricted to the broadcaster's valid region, so
  /// the broadcast is used as is.
  SupportRestriction,
};

enum class InteractionMode { Expectation, PriorSampling };
enum class ExchangeMode { Simultaneous, TurnBased };

std::string to_string(Regularization r);
std::string to_string(InteractionMode m);
std::string to_string(ExchangeMode m);

/// An infinitely confident agent: a delta prior that never updates.
struct ExogenousSource {
  ParameterChart chart;
  Eigen::VectorXd point;
};

struct AgentStreams {
  RngStream choice;
  RngStream outcome;
  RngStream resample;
  RngStream broadcast;
  RngStream plot;

  static AgentStreams derive(std::uint64_t seed, const std::string& key);
};

Eigen::VectorXd broadcast(const Agent& agent);
/// A point drawn from the agent's current posterior.
Eigen::VectorXd broadcast_sample(const Agent& agent, RngStream& rng);

ProbVector regularize(const ParameterChart& from, const Eigen::VectorXd& point, const ParameterChart& to,
                      Regularization reg);

/// Draws j with probability given by the postulate applied to p and R.
Eigen::Index sample_outcome(const PhysicalPostulate& post, const ProbVector& p, const CondProbMatrix& r,
                            RngStream& rng);

struct AgentRecord {
  std::string agent;
  std::string action;
  long long outcome = -1;
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
  double cov_trace = 0.0;
  Eigen::VectorXd axis_lengths;
  Eigen::MatrixXd axes;
  double dist_source = std::numeric_limits<double>::quiet_NaN();
  double dist_frequency = std::numeric_limits<double>::quiet_NaN();
  double outcome_frequency = std::numeric_limits<double>::quiet_NaN();
  bool resampled = false;
};

struct InteractionRecord {
  long long step = 0;
  std::vector<AgentRecord> agents;
  double mean_gap = std::numeric_limits<double>::quiet_NaN();
};

/// Distance between two agents' posterior means: |delta theta| for two
/// interval agents, trace distance of the mean states otherwise (an interval
/// agent's mean theta is read as diag(theta, 1 - theta)).
double mean_gap(const Agent& a, const Agent& b);

AgentRecord summarize(const Agent& agent, const ExogenousSource* source);

struct StepResult {
  std::vector<std::size_t> actions;
  std::vector<Eigen::Index> outcomes;
  std::vector<bool> resampled;
};

StepResult step_exogenous(Agent& agent, const ExogenousSource& source, Regularization reg, AgentStreams& streams);

/// Both broadcast their pre-update means, both choose, both receive outcomes,
/// both update and rejuvenate.
StepResult step_expectation_sampling(Agent& a, Agent& b, Regularization reg_a, Regularization reg_b,
                                     AgentStreams& sa, AgentStreams& sb);

/// Like expectation sampling but the broadcast is a posterior draw. In
/// turn-based mode a's draw reaches b, b updates, then b's updated posterior
/// is sampled for a.
StepResult step_prior_sampling(Agent& a, Agent& b, Regularization reg_a, Regularization reg_b, AgentStreams& sa,
                               AgentStreams& sb, ExchangeMode mode);

struct Snapshot {
  long long step = 0;
  std::string agent;
  /// Interval agents: posterior density on the grid.
  std::vector<double> theta;
  std::vector<double> density;
  /// Bloch agents: weighted draws from the posterior (3 x m) and whether each
  /// lies inside the standard deviation ellipsoid.
  Eigen::MatrixXd cloud;
  std::vector<bool> inside;
  /// Bloch agents: histogram density of (1 + z) / 2.
  std::vector<double> z_theta;
  std::vector<double> z_density;
};

struct Simulation {
  std::string scenario;
  std::uint64_t seed = 0;
  long long n_steps = 0;
  long long summary_interval = 10;
  InteractionMode mode = InteractionMode::Expectation;
  ExchangeMode exchange = ExchangeMode::Simultaneous;
  std::vector<Agent> agents;
  /// Applied by agent i to what it receives.
  std::vector<Regularization> regularization;
  std::optional<ExogenousSource> source;
  std::vector<long long> snapshot_steps;
  std::size_t cloud_points = 2000;
};

struct Trace {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string status = "completed";
  std::string message;
  long long terminated_step = -1;
  long long summary_interval = 10;
  std::string config_json;
  std::vector<InteractionRecord> records;
  std::vector<Snapshot> snapshots;
  std::vector<Agent> final_agents;
  std::optional<ExogenousSource> source;
};

Snapshot take_snapshot(const Agent& agent, long long step, RngStream& rng, std::size_t cloud_points);

/// Runs the simulation. An impossible outcome ends the run early with
/// status "terminated"; other errors propagate.
Trace run(Simulation sim);

}  // namespace qbagents
