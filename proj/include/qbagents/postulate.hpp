#pragma once

#include <Eigen/Dense>

#include <optional>

#include "qbagents/core_math.hpp"
#include "qbagents/quantum.hpp"

namespace qbagents {

/// Ball-membership tolerance on the Bloch radius (and eigenvalue floor for d > 2).
inline constexpr double kRegionTol = 1e-9;

enum class PostulateKind { Classical, Quantum };

/// The set of reference probability vectors an agent can hold.
struct ValidRegion {
  enum class Kind { FullSimplex, QubitBall, ZChord };
  Kind kind = Kind::FullSimplex;
  std::size_t n = 0;
};

/// Links reference probabilities p to the probabilities q of any action with
/// conditional matrix R via q = R Phi p. Phi is the identity for a classical
/// agent and the inverse of the reference action's self-conditional matrix for
/// a quantum one.
class PhysicalPostulate {
 public:
  static PhysicalPostulate classical(std::size_t n);
  static PhysicalPostulate quantum(const ReferenceAction& ref);

  PostulateKind kind() const { return kind_; }
  std::size_t size() const { return static_cast<std::size_t>(phi_.rows()); }
  const Eigen::MatrixXd& phi() const { return phi_; }
  const std::optional<ReferenceAction>& reference() const { return ref_; }
  ValidRegion region() const;

  /// q = R Phi p.
  ProbVector apply(const ProbVector& p, const CondProbMatrix& r) const;
  /// p(j | p) for a single outcome.
  double likelihood_row(const CondProbMatrix& r, Eigen::Index j, const ProbVector& p) const;
  /// Row j of R Phi, so that p(j | p) = w . p. Linear in p for both kinds.
  Eigen::VectorXd likelihood_weights(const CondProbMatrix& r, Eigen::Index j) const;
  /// All rows at once: (R Phi).
  Eigen::MatrixXd likelihood_matrix(const CondProbMatrix& r) const;

  bool is_valid_state(const ProbVector& p) const;
  /// sum_i (Phi p)_i rho_i. Quantum only.
  HermitianOp state_of(const ProbVector& p) const;

 private:
  PhysicalPostulate(PostulateKind kind, Eigen::MatrixXd phi, std::optional<ReferenceAction> ref);

  PostulateKind kind_;
  Eigen::MatrixXd phi_;
  std::optional<ReferenceAction> ref_;
};

/// Inverse of [tr E_i rho_j].
Eigen::MatrixXd phi_matrix(const ReferenceAction& ref);

/// Principal square root of a diagonalizable matrix with positive spectrum.
Eigen::MatrixXd sqrt_phi(const Eigen::MatrixXd& phi);

/// SIC reference probabilities of the qubit state with Bloch vector b.
ProbVector sic_probabilities(const Eigen::Vector3d& b);

}  // namespace qbagents
