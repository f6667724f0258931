#include "qbagents/agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qbagents/errors.hpp"

namespace qbagents {

namespace {

std::vector<std::string> default_labels(Eigen::Index n) {
  std::vector<std::string> labels;
  for (Eigen::Index j = 0; j < n; ++j) labels.push_back(std::to_string(j + 1));
  return labels;
}

}  // namespace

std::string axis_name(PauliAxis axis) {
  switch (axis) {
    case PauliAxis::X:
      return "X";
    case PauliAxis::Y:
      return "Y";
    case PauliAxis::Z:
      return "Z";
  }
  return "?";
}

Action povm_action(std::string name, const Povm& povm, const ReferenceAction& ref, std::vector<std::string> labels) {
  Action a;
  a.name = std::move(name);
  a.matrix = conditional_matrix(povm, ref);
  a.outcome_labels = labels.empty() ? default_labels(a.matrix.outcomes()) : std::move(labels);
  a.utility = Eigen::VectorXd::Ones(a.matrix.outcomes());
  a.povm_derived = true;
  return a;
}

Action matrix_action(std::string name, CondProbMatrix matrix, std::vector<std::string> labels) {
  Action a;
  a.name = std::move(name);
  a.matrix = std::move(matrix);
  a.outcome_labels = labels.empty() ? default_labels(a.matrix.outcomes()) : std::move(labels);
  a.utility = Eigen::VectorXd::Ones(a.matrix.outcomes());
  return a;
}

Action pauli_action(PauliAxis axis, const ReferenceAction& ref) {
  Action a = povm_action(axis_name(axis), pauli_povm(axis), ref, {"+1", "-1"});
  a.axis = axis;
  return a;
}

Action sharp_pauli_action(PauliAxis axis, const ReferenceAction& ref) {
  const CondProbMatrix r = conditional_matrix(pauli_povm(axis), ref);
  Action a = matrix_action("sharp_" + axis_name(axis), CondProbMatrix(r.matrix() * sqrt_phi(phi_matrix(ref))),
                           {"+1", "-1"});
  a.axis = axis;
  return a;
}

Action reference_action(const ReferenceAction& ref) { return povm_action("sic", ref.effects(), ref); }

Action trivial_action(std::size_t reference_size) {
  Action a = matrix_action("none", CondProbMatrix(Eigen::MatrixXd::Ones(1, static_cast<Eigen::Index>(reference_size))),
                           {"1"});
  a.povm_derived = true;
  return a;
}

Action identity_action(std::string name, std::size_t n, std::vector<std::string> labels) {
  const auto k = static_cast<Eigen::Index>(n);
  return matrix_action(std::move(name), CondProbMatrix(Eigen::MatrixXd::Identity(k, k)), std::move(labels));
}

// ---------------------------------------------------------------------------

Agent::Agent(std::string id, std::string stream_key, PhysicalPostulate postulate, ParticleEnsemble ensemble,
             std::vector<Action> menu)
    : id_(std::move(id)),
      stream_key_(std::move(stream_key)),
      postulate_(std::move(postulate)),
      ensemble_(std::move(ensemble)),
      menu_(std::move(menu)) {
  if (menu_.empty()) throw DomainError("agent " + id_ + " has an empty action menu");
  if (static_cast<std::size_t>(ensemble_.chart().reference_size()) != postulate_.size())
    throw DimensionMismatch("agent " + id_ + ": ensemble chart and postulate differ in reference size");
  if (postulate_.kind() == PostulateKind::Quantum && ensemble_.chart().kind() == ChartKind::Interval)
    throw DomainError("agent " + id_ + ": quantum agents need a Bloch or simplex chart");

  for (const auto& a : menu_) {
    if (static_cast<std::size_t>(a.matrix.reference_size()) != postulate_.size())
      throw DimensionMismatch("action " + a.name + " has the wrong reference dimension");
    if (a.utility.size() != a.matrix.outcomes() || !a.utility.allFinite())
      throw DomainError("action " + a.name + " needs one finite utility per outcome");
    if (static_cast<Eigen::Index>(a.outcome_labels.size()) != a.matrix.outcomes())
      throw DomainError("action " + a.name + " needs one label per outcome");
    if (postulate_.kind() == PostulateKind::Quantum && !a.povm_derived)
      throw InvalidConditionalMatrix("action " + a.name + " does not come from a POVM; a quantum agent cannot use it");
    lik_.push_back(postulate_.likelihood_matrix(a.matrix));
    counts_.emplace_back(static_cast<std::size_t>(a.matrix.outcomes()), 0);
  }

  // Every point with prior mass must give a valid distribution for every action.
  const auto& pts = ensemble_.points();
  for (std::size_t a = 0; a < menu_.size(); ++a) {
    const Eigen::MatrixXd q = lik_[a] * ((ensemble_.chart().linear() * pts).colwise() + ensemble_.chart().offset());
    for (Eigen::Index i = 0; i < q.cols(); ++i) {
      if (ensemble_.weights()(i) > 0.0 && q.col(i).minCoeff() < -kProbTol) {
        std::ostringstream os;
        os << "agent " << id_ << ": prior point " << i << " gives a negative probability for action "
           << menu_[a].name;
        throw RegionViolation(os.str());
      }
    }
  }
}

ProbVector Agent::predictive(std::size_t a) const {
  Eigen::VectorXd q = likelihood_matrix(a) * ensemble_.chart().raw_probabilities(ensemble_.mean());
  return ProbVector(std::move(q));
}

double Agent::expected_utility(std::size_t a) const { return action(a).utility.dot(predictive(a).vector()); }

std::size_t Agent::choose_action(RngStream& rng) const {
  std::vector<double> eu(menu_.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < menu_.size(); ++a) {
    eu[a] = expected_utility(a);
    best = std::max(best, eu[a]);
  }
  std::vector<std::size_t> ties;
  for (std::size_t a = 0; a < menu_.size(); ++a)
    if (eu[a] >= best - kTieTol) ties.push_back(a);
  if (ties.size() == 1) return ties.front();
  return ties[rng.below(ties.size())];
}

void Agent::observe(std::size_t a, Eigen::Index j) {
  const auto& lik = likelihood_matrix(a);
  if (j < 0 || j >= lik.rows()) throw DomainError("outcome index out of range for action " + action(a).name);
  ensemble_.update(lik.row(j).transpose());
  ++counts_[a][static_cast<std::size_t>(j)];
  if (action(a).axis && lik.rows() == 2) pauli_counts_.record(*action(a).axis, j == 0);
}

}  // namespace qbagents
