#include "qbagents/quantum.hpp"

#include <cmath>
#include <sstream>

#include "qbagents/errors.hpp"

namespace qbagents {

HermitianOp::HermitianOp(CMatrix m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) throw DimensionMismatch("operator must be square and nonempty");
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kOpTol) throw DomainError("operator is not Hermitian");
  m_ = 0.5 * (m_ + m_.adjoint());
}

Eigen::VectorXd HermitianOp::eigenvalues() const {
  if (dim() == 2) {
    const double a = m_(0, 0).real();
    const double d = m_(1, 1).real();
    const double mean = 0.5 * (a + d);
    const double r = std::hypot(0.5 * (a - d), std::abs(m_(0, 1)));
    return Eigen::Vector2d(mean - r, mean + r);
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

DensityOp::DensityOp(const HermitianOp& op) : op_(op) {
  const double tr = op.trace();
  if (std::abs(tr - 1.0) > kOpTol) {
    std::ostringstream os;
    os << "density operator trace is " << tr;
    throw DomainError(os.str());
  }
  const auto ev = op.eigenvalues();
  if (ev.minCoeff() < -kOpTol) {
    std::ostringstream os;
    os << "density operator has eigenvalue " << ev.minCoeff();
    throw DomainError(os.str());
  }
  if (ev.minCoeff() < 0.0) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(op.matrix());
    Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    clipped /= clipped.sum();
    CMatrix m = es.eigenvectors() * clipped.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    op_ = HermitianOp(std::move(m));
  }
}

Povm::Povm(std::vector<HermitianOp> effects) : effects_(std::move(effects)) {
  if (effects_.empty()) throw DomainError("POVM needs at least one effect");
  const auto d = effects_.front().dim();
  CMatrix total = CMatrix::Zero(d, d);
  for (const auto& e : effects_) {
    if (e.dim() != d) throw DimensionMismatch("POVM effects differ in dimension");
    if (e.eigenvalues().minCoeff() < -kOpTol) throw DomainError("POVM effect is not positive semidefinite");
    total += e.matrix();
  }
  if ((total - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > kOpTol)
    throw DomainError("POVM effects do not sum to the identity");
}

namespace {

// Hilbert-Schmidt Gram matrix tr(A_i A_j) of a set of Hermitian operators.
template <typename Range, typename Get>
Eigen::MatrixXd hs_gram(const Range& ops, Get get) {
  const auto n = static_cast<Eigen::Index>(ops.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      g(i, j) = (get(ops[static_cast<std::size_t>(i)]) * get(ops[static_cast<std::size_t>(j)])).trace().real();
  return g;
}

bool nonsingular(const Eigen::MatrixXd& g) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
  lu.setThreshold(1e-12);
  return lu.isInvertible();
}

}  // namespace

ReferenceAction::ReferenceAction(Povm effects, std::vector<DensityOp> post_states)
    : effects_(std::move(effects)), post_states_(std::move(post_states)) {
  const auto d = effects_.dim();
  const auto n = static_cast<std::size_t>(d * d);
  if (effects_.size() != n) throw DomainError("reference action needs exactly d^2 effects");
  if (post_states_.size() != n) throw DomainError("reference action needs one post-measurement state per effect");
  for (const auto& s : post_states_)
    if (s.dim() != d) throw DimensionMismatch("post-measurement state dimension differs from effects");

  if (!nonsingular(hs_gram(effects_.effects(), [](const HermitianOp& h) { return h.matrix(); })))
    throw DomainError("reference effects are not linearly independent");
  if (!nonsingular(hs_gram(post_states_, [](const DensityOp& s) { return s.matrix(); })))
    throw DomainError("post-measurement states are not linearly independent");

  Eigen::MatrixXd self(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      self(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (effects_[i].matrix() * post_states_[j].matrix()).trace().real();
  if (!nonsingular(self)) throw DomainError("reference action conditional matrix is singular");
}

double BlochPoint::norm() const { return std::sqrt(x * x + y * y + z * z); }

const std::array<CMatrix, 3>& pauli_matrices() {
  static const std::array<CMatrix, 3> paulis = [] {
    const Complex i(0.0, 1.0);
    CMatrix sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0.0, 1.0, 1.0, 0.0;
    sy << 0.0, -i, i, 0.0;
    sz << 1.0, 0.0, 0.0, -1.0;
    return std::array<CMatrix, 3>{sx, sy, sz};
  }();
  return paulis;
}

ReferenceAction sic_d2() {
  const double s3 = std::sqrt(3.0);
  Eigen::Vector2cd psi1;
  psi1 << std::sqrt((3.0 + s3) / 6.0), std::sqrt((3.0 - s3) / 6.0) * std::polar(1.0, M_PI / 4.0);
  const auto& p = pauli_matrices();
  const std::array<Eigen::Vector2cd, 4> psis = {psi1, p[2] * psi1, p[0] * psi1, p[0] * p[2] * psi1};

  std::vector<HermitianOp> effects;
  std::vector<DensityOp> posts;
  for (const auto& psi : psis) {
    const CMatrix proj = psi * psi.adjoint();
    effects.emplace_back(0.5 * proj);
    posts.emplace_back(proj);
  }
  return ReferenceAction(Povm(std::move(effects)), std::move(posts));
}

Povm pauli_povm(PauliAxis axis) {
  const auto& sigma = pauli_matrices()[static_cast<std::size_t>(axis)];
  const CMatrix id = CMatrix::Identity(2, 2);
  return Povm({HermitianOp(0.5 * (id + sigma)), HermitianOp(0.5 * (id - sigma))});
}

Povm trivial_povm(Eigen::Index dim) { return Povm({HermitianOp(CMatrix::Identity(dim, dim))}); }

ProbVector born_probabilities(const DensityOp& rho, const Povm& povm) {
  if (rho.dim() != povm.dim()) throw DimensionMismatch("state and POVM dimensions differ");
  Eigen::VectorXd q(static_cast<Eigen::Index>(povm.size()));
  for (std::size_t j = 0; j < povm.size(); ++j)
    q(static_cast<Eigen::Index>(j)) = (rho.matrix() * povm[j].matrix()).trace().real();
  return ProbVector(std::move(q));
}

CondProbMatrix conditional_matrix(const Povm& povm, const ReferenceAction& ref) {
  if (povm.dim() != ref.dim()) throw DimensionMismatch("POVM and reference action dimensions differ");
  Eigen::MatrixXd r(static_cast<Eigen::Index>(povm.size()), static_cast<Eigen::Index>(ref.size()));
  for (std::size_t j = 0; j < povm.size(); ++j)
    for (std::size_t i = 0; i < ref.size(); ++i)
      r(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
          (povm[j].matrix() * ref.post_states()[i].matrix()).trace().real();
  return CondProbMatrix(std::move(r));
}

double trace_distance(const HermitianOp& a, const HermitianOp& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("trace distance needs operators of equal dimension");
  return 0.5 * HermitianOp(a.matrix() - b.matrix()).eigenvalues().cwiseAbs().sum();
}

double trace_distance(const DensityOp& a, const DensityOp& b) { return trace_distance(a.op(), b.op()); }

HermitianOp bloch_operator(const Eigen::Vector3d& a) {
  const auto& p = pauli_matrices();
  CMatrix m = 0.5 * (CMatrix::Identity(2, 2) + a(0) * p[0] + a(1) * p[1] + a(2) * p[2]);
  return HermitianOp(std::move(m));
}

DensityOp bloch_to_density(const BlochPoint& p) {
  if (p.norm() > 1.0 + kOpTol) throw RegionViolation("Bloch vector lies outside the unit ball");
  return DensityOp(bloch_operator(p.vector()));
}

BlochPoint density_to_bloch(const DensityOp& rho) {
  if (rho.dim() != 2) throw DimensionMismatch("Bloch coordinates need a qubit state");
  const auto& p = pauli_matrices();
  const auto& m = rho.matrix();
  return {(m * p[0]).trace().real(), (m * p[1]).trace().real(), (m * p[2]).trace().real()};
}

void PauliCounts::record(PauliAxis axis, bool plus_outcome) {
  auto& slot = plus_outcome ? plus : minus;
  ++slot[static_cast<std::size_t>(axis)];
}

FrequencyOperator frequency_operator(const PauliCounts& counts) {
  FrequencyOperator f;
  for (std::size_t k = 0; k < 3; ++k) {
    const long long n = counts.plus[k] + counts.minus[k];
    if (n == 0) {
      f.averages(static_cast<Eigen::Index>(k)) = 0.0;
      f.empty_axis[k] = true;
    } else {
      f.averages(static_cast<Eigen::Index>(k)) =
          static_cast<double>(counts.plus[k] - counts.minus[k]) / static_cast<double>(n);
    }
  }
  f.op = bloch_operator(f.averages);
  return f;
}

}  // namespace qbagents
