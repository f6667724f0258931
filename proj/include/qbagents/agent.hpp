#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "qbagents/core_math.hpp"
#include "qbagents/inference.hpp"
#include "qbagents/postulate.hpp"
#include "qbagents/quantum.hpp"
#include "qbagents/rng.hpp"

namespace qbagents {

inline constexpr double kTieTol = 1e-12;

struct Action {
  std::string name;
  CondProbMatrix matrix;
  std::vector<std::string> outcome_labels;
  /// One utility per outcome.
  Eigen::VectorXd utility;
  /// Set when the matrix was computed from a POVM against the reference action.
  bool povm_derived = false;
  /// Pauli axis for actions whose outcomes are (+1, -1) along an axis.
  std::optional<PauliAxis> axis;
};

/// R(j|i) = tr D_j rho_i for a quantum measurement.
Action povm_action(std::string name, const Povm& povm, const ReferenceAction& ref,
                   std::vector<std::string> labels = {});
/// Any column-stochastic matrix. Valid only for classical agents.
Action matrix_action(std::string name, CondProbMatrix matrix, std::vector<std::string> labels = {});

Action pauli_action(PauliAxis axis, const ReferenceAction& ref);
/// R_P Phi^{1/2}: sharp matrices that no quantum measurement realizes.
Action sharp_pauli_action(PauliAxis axis, const ReferenceAction& ref);
Action reference_action(const ReferenceAction& ref);
/// Measurement with a single certain outcome; never informative.
Action trivial_action(std::size_t reference_size);
/// Classical reference action: R = I.
Action identity_action(std::string name, std::size_t n, std::vector<std::string> labels = {});

std::string axis_name(PauliAxis axis);

class Agent {
 public:
  Agent(std::string id, std::string stream_key, PhysicalPostulate postulate, ParticleEnsemble ensemble,
        std::vector<Action> menu);

  const std::string& id() const { return id_; }
  const std::string& stream_key() const { return stream_key_; }
  const PhysicalPostulate& postulate() const { return postulate_; }
  const ParticleEnsemble& ensemble() const { return ensemble_; }
  const std::vector<Action>& menu() const { return menu_; }
  const Action& action(std::size_t a) const { return menu_.at(a); }
  /// Row j is the likelihood weight vector of outcome j.
  const Eigen::MatrixXd& likelihood_matrix(std::size_t a) const { return lik_.at(a); }

  ProbVector predictive(std::size_t a) const;
  double expected_utility(std::size_t a) const;
  /// Argmax of expected utility; ties within kTieTol broken uniformly by `rng`.
  std::size_t choose_action(RngStream& rng) const;

  void observe(std::size_t a, Eigen::Index j);
  bool rejuvenate(RngStream& rng) { return ensemble_.resample_move(rng); }

  const PauliCounts& pauli_counts() const { return pauli_counts_; }
  /// Outcome tallies per action.
  const std::vector<std::vector<long long>>& outcome_counts() const { return counts_; }

 private:
  std::string id_;
  std::string stream_key_;
  PhysicalPostulate postulate_;
  ParticleEnsemble ensemble_;
  std::vector<Action> menu_;
  std::vector<Eigen::MatrixXd> lik_;
  PauliCounts pauli_counts_;
  std::vector<std::vector<long long>> counts_;
};

}  // namespace qbagents
