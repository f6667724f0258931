#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <vector>

#include "qbagents/core_math.hpp"

namespace qbagents {

using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

inline constexpr double kOpTol = 1e-10;

/// A d x d self-adjoint operator. May be indefinite (frequency operators are).
class HermitianOp {
 public:
  HermitianOp() = default;
  explicit HermitianOp(CMatrix m);

  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }
  /// Ascending. Closed form for d = 2, Eigen's self-adjoint solver otherwise.
  Eigen::VectorXd eigenvalues() const;
  double trace() const { return m_.trace().real(); }

 private:
  CMatrix m_;
};

/// Positive semidefinite, unit trace. Construction tolerates eigenvalues down
/// to -kOpTol and projects them onto the PSD cone (clip, then renormalize).
class DensityOp {
 public:
  explicit DensityOp(const HermitianOp& op);
  explicit DensityOp(CMatrix m) : DensityOp(HermitianOp(std::move(m))) {}

  Eigen::Index dim() const { return op_.dim(); }
  const HermitianOp& op() const { return op_; }
  const CMatrix& matrix() const { return op_.matrix(); }

 private:
  HermitianOp op_;
};

class Povm {
 public:
  explicit Povm(std::vector<HermitianOp> effects);

  std::size_t size() const { return effects_.size(); }
  Eigen::Index dim() const { return effects_.front().dim(); }
  const HermitianOp& operator[](std::size_t j) const { return effects_[j]; }
  const std::vector<HermitianOp>& effects() const { return effects_; }

 private:
  std::vector<HermitianOp> effects_;
};

/// The hypothetical standard measurement: an informationally complete POVM
/// with d^2 effects plus the state prepared after each outcome.
class ReferenceAction {
 public:
  ReferenceAction(Povm effects, std::vector<DensityOp> post_states);

  std::size_t size() const { return effects_.size(); }
  Eigen::Index dim() const { return effects_.dim(); }
  const Povm& effects() const { return effects_; }
  const std::vector<DensityOp>& post_states() const { return post_states_; }

 private:
  Povm effects_;
  std::vector<DensityOp> post_states_;
};

struct BlochPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
  Eigen::Vector3d vector() const { return {x, y, z}; }
  static BlochPoint from(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }
};

enum class PauliAxis { X, Y, Z };

const std::array<CMatrix, 3>& pauli_matrices();

/// Qubit SIC: H_i = |psi_i><psi_i| / 2 forming a tetrahedron in the Bloch
/// ball, with the pure projectors |psi_i><psi_i| as post-measurement states.
ReferenceAction sic_d2();

/// Projectors onto the +1 and -1 eigenspaces, in that order.
Povm pauli_povm(PauliAxis axis);

/// The single-outcome measurement {I}: always yields outcome 0.
Povm trivial_povm(Eigen::Index dim);

ProbVector born_probabilities(const DensityOp& rho, const Povm& povm);

/// R(j|i) = tr D_j rho_i.
CondProbMatrix conditional_matrix(const Povm& povm, const ReferenceAction& ref);

/// Half the trace norm of the difference. Accepts indefinite operators.
double trace_distance(const HermitianOp& a, const HermitianOp& b);
double trace_distance(const DensityOp& a, const DensityOp& b);

DensityOp bloch_to_density(const BlochPoint& p);
BlochPoint density_to_bloch(const DensityOp& rho);
/// (I + a.sigma) / 2 without any positivity requirement.
HermitianOp bloch_operator(const Eigen::Vector3d& a);

/// Tallies of +1 / -1 outcomes for each Pauli axis.
struct PauliCounts {
  std::array<long long, 3> plus{0, 0, 0};
  std::array<long long, 3> minus{0, 0, 0};

  void record(PauliAxis axis, bool plus_outcome);
};

struct FrequencyOperator {
  HermitianOp op;
  Eigen::Vector3d averages;
  /// Axes that had no outcomes yet; their component is 0.
  std::array<bool, 3> empty_axis{false, false, false};
};

FrequencyOperator frequency_operator(const PauliCounts& counts);

}  // namespace qbagents
