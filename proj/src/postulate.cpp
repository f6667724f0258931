#include "qbagents/postulate.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

#include "qbagents/errors.hpp"

namespace qbagents {

PhysicalPostulate::PhysicalPostulate(PostulateKind kind, Eigen::MatrixXd phi, std::optional<ReferenceAction> ref)
    : kind_(kind), phi_(std::move(phi)), ref_(std::move(ref)) {}

PhysicalPostulate PhysicalPostulate::classical(std::size_t n) {
  if (n == 0) throw DomainError("classical postulate needs at least one reference outcome");
  const auto k = static_cast<Eigen::Index>(n);
  return PhysicalPostulate(PostulateKind::Classical, Eigen::MatrixXd::Identity(k, k), std::nullopt);
}

PhysicalPostulate PhysicalPostulate::quantum(const ReferenceAction& ref) {
  Eigen::MatrixXd phi = phi_matrix(ref);
  if (!(phi.minCoeff() < 0.0)) throw DomainError("quantum Phi matrix has no negative entry");
  return PhysicalPostulate(PostulateKind::Quantum, std::move(phi), ref);
}

ValidRegion PhysicalPostulate::region() const {
  if (kind_ == PostulateKind::Classical) return {ValidRegion::Kind::FullSimplex, size()};
  return {ValidRegion::Kind::QubitBall, size()};
}

Eigen::MatrixXd PhysicalPostulate::likelihood_matrix(const CondProbMatrix& r) const {
  if (static_cast<std::size_t>(r.reference_size()) != size())
    throw DimensionMismatch("conditional matrix reference dimension differs from the postulate");
  return r.matrix() * phi_;
}

Eigen::VectorXd PhysicalPostulate::likelihood_weights(const CondProbMatrix& r, Eigen::Index j) const {
  if (j < 0 || j >= r.outcomes()) throw DomainError("outcome index out of range");
  return likelihood_matrix(r).row(j).transpose();
}

ProbVector PhysicalPostulate::apply(const ProbVector& p, const CondProbMatrix& r) const {
  if (p.size() != size()) throw DimensionMismatch("reference probability vector has the wrong length");
  if (!is_valid_state(p)) throw RegionViolation("reference probabilities lie outside the physically valid region");
  Eigen::VectorXd q = likelihood_matrix(r) * p.vector();
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    if (q(j) < -kProbTol) {
      std::ostringstream os;
      os << "postulate yields q(" << j << ") = " << q(j) << "; conditional matrix is not valid for this agent";
      throw InvalidConditionalMatrix(os.str());
    }
  }
  return ProbVector(std::move(q));
}

double PhysicalPostulate::likelihood_row(const CondProbMatrix& r, Eigen::Index j, const ProbVector& p) const {
  return apply(p, r)[static_cast<std::size_t>(j)];
}

HermitianOp PhysicalPostulate::state_of(const ProbVector& p) const {
  if (!ref_) throw DomainError("classical postulates have no density operator");
  if (p.size() != size()) throw DimensionMismatch("reference probability vector has the wrong length");
  const Eigen::VectorXd c = phi_ * p.vector();
  const auto d = ref_->dim();
  CMatrix rho = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < ref_->size(); ++i) rho += c(static_cast<Eigen::Index>(i)) * ref_->post_states()[i].matrix();
  return HermitianOp(std::move(rho));
}

bool PhysicalPostulate::is_valid_state(const ProbVector& p) const {
  if (p.size() != size()) return false;
  if (kind_ == PostulateKind::Classical) return true;
  const HermitianOp rho = state_of(p);
  if (rho.dim() == 2) {
    const auto& m = rho.matrix();
    const auto& s = pauli_matrices();
    const Eigen::Vector3d a((m * s[0]).trace().real(), (m * s[1]).trace().real(), (m * s[2]).trace().real());
    return a.norm() <= 1.0 + kRegionTol;
  }
  return rho.eigenvalues().minCoeff() >= -kRegionTol;
}

Eigen::MatrixXd phi_matrix(const ReferenceAction& ref) {
  const auto n = static_cast<Eigen::Index>(ref.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = (ref.effects()[static_cast<std::size_t>(i)].matrix() *
                 ref.post_states()[static_cast<std::size_t>(j)].matrix()).trace().real();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) throw DomainError("reference action conditional matrix is singular");
  return lu.inverse();
}

Eigen::MatrixXd sqrt_phi(const Eigen::MatrixXd& phi) {
  if (phi.rows() != phi.cols() || phi.rows() == 0) throw DimensionMismatch("sqrt_phi needs a square matrix");
  Eigen::EigenSolver<Eigen::MatrixXd> es(phi);
  if (es.info() != Eigen::Success) throw DomainError("eigendecomposition of Phi failed");
  const Eigen::VectorXcd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i).imag()) > 1e-10 || !(ev(i).real() > 0.0)) throw DomainError("Phi spectrum is not positive");
  }
  const Eigen::MatrixXcd v = es.eigenvectors();
  const Eigen::MatrixXcd root = v * ev.cwiseSqrt().asDiagonal() * v.inverse();
  if (root.imag().cwiseAbs().maxCoeff() > 1e-10) throw DomainError("Phi square root is not real");
  return root.real();
}

ProbVector sic_probabilities(const Eigen::Vector3d& b) {
  const double s = std::sqrt(3.0);
  Eigen::Vector4d p(3.0 + s * (b(0) + b(1) + b(2)), 3.0 + s * (-b(0) - b(1) + b(2)),
                    3.0 + s * (b(0) - b(1) - b(2)), 3.0 + s * (-b(0) + b(1) - b(2)));
  return ProbVector(Eigen::VectorXd(p / 12.0));
}

}  // namespace qbagents
