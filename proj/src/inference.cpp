#include "qbagents/inference.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qbagents/errors.hpp"

namespace qbagents {

ParameterChart ParameterChart::interval() {
  Eigen::VectorXd offset(2);
  offset << 0.0, 1.0;
  Eigen::MatrixXd linear(2, 1);
  linear << 1.0, -1.0;
  return ParameterChart(ChartKind::Interval, std::move(offset), std::move(linear));
}

ParameterChart ParameterChart::bloch(const ReferenceAction& ref) {
  if (ref.dim() != 2) throw DimensionMismatch("Bloch chart needs a qubit reference action");
  const auto n = static_cast<Eigen::Index>(ref.size());
  const auto& sigma = pauli_matrices();
  Eigen::VectorXd offset(n);
  Eigen::MatrixXd linear(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const CMatrix& e = ref.effects()[static_cast<std::size_t>(i)].matrix();
    offset(i) = 0.5 * e.trace().real();
    for (Eigen::Index k = 0; k < 3; ++k) linear(i, k) = 0.5 * (sigma[static_cast<std::size_t>(k)] * e).trace().real();
  }
  return ParameterChart(ChartKind::Bloch, std::move(offset), std::move(linear));
}

ParameterChart ParameterChart::simplex(std::size_t n) {
  if (n < 2) throw DomainError("simplex chart needs at least two outcomes");
  const auto k = static_cast<Eigen::Index>(n);
  return ParameterChart(ChartKind::Simplex, Eigen::VectorXd::Zero(k), Eigen::MatrixXd::Identity(k, k));
}

Support Support::interval(double lo, double hi) {
  if (!(lo >= 0.0 && hi <= 1.0 && lo < hi)) throw DomainError("interval support must satisfy 0 <= lo < hi <= 1");
  return {Kind::Interval, lo, hi};
}

bool Support::contains(const Eigen::VectorXd& x, double tol) const {
  switch (kind) {
    case Kind::Interval:
      return x.size() == 1 && x(0) >= lo - tol && x(0) <= hi + tol;
    case Kind::Ball:
      return x.size() == 3 && x.norm() <= 1.0 + tol;
    case Kind::Simplex:
      return x.minCoeff() >= -tol && std::abs(x.sum() - 1.0) <= 1e-9 + tol;
  }
  return false;
}

// ---------------------------------------------------------------------------

ParticleEnsemble::ParticleEnsemble(ParameterChart chart, Support support, Eigen::MatrixXd points,
                                   Eigen::VectorXd weights, Representation repr)
    : chart_(std::move(chart)), support_(support), points_(std::move(points)), weights_(std::move(weights)),
      repr_(repr) {
  if (points_.cols() < 1) throw DomainError("ensemble needs at least one point");
  if (points_.rows() != chart_.dim()) throw DimensionMismatch("ensemble points do not match the chart dimension");
  if (weights_.size() != points_.cols()) throw DimensionMismatch("ensemble weights and points differ in count");
  weights_ = ProbVector(weights_).vector();
  for (Eigen::Index i = 0; i < points_.cols(); ++i) {
    if (!support_.contains(points_.col(i), kRegionTol) && !(repr_ == Representation::Grid && weights_(i) == 0.0)) {
      std::ostringstream os;
      os << "ensemble point " << i << " lies outside its support";
      throw RegionViolation(os.str());
    }
  }
}

ParticleEnsemble ParticleEnsemble::grid(const std::function<double(double)>& pdf, double lo, double hi,
                                        std::size_t n) {
  const Support support = Support::interval(lo, hi);
  const auto g = Density1D::uniform_grid(n);
  Eigen::MatrixXd pts(1, static_cast<Eigen::Index>(n));
  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    pts(0, k) = g[i];
    const double v = (g[i] >= lo && g[i] <= hi) ? pdf(g[i]) : 0.0;
    if (!std::isfinite(v) || v < 0.0) throw DomainError("prior density must be finite and nonnegative");
    w(k) = v;
  }
  const double total = w.sum();
  if (!(total > 0.0)) throw DomainError("prior has no mass on the grid");
  return ParticleEnsemble(ParameterChart::interval(), support, std::move(pts), w / total, Representation::Grid);
}

ParticleEnsemble ParticleEnsemble::grid(const Density1D& density) {
  const auto n = static_cast<Eigen::Index>(density.size());
  Eigen::MatrixXd pts(1, n);
  for (Eigen::Index i = 0; i < n; ++i) pts(0, i) = density.grid()[static_cast<std::size_t>(i)];
  return ParticleEnsemble(ParameterChart::interval(), Support::interval(0.0, 1.0), std::move(pts),
                          density.weights().vector(), Representation::Grid);
}

namespace {

Support natural_support(const ParameterChart& chart) {
  switch (chart.kind()) {
    case ChartKind::Interval:
      return Support::interval(0.0, 1.0);
    case ChartKind::Bloch:
      return Support::ball();
    case ChartKind::Simplex:
      return Support::simplex();
  }
  return Support::interval(0.0, 1.0);
}

}  // namespace

ParticleEnsemble ParticleEnsemble::atoms(ParameterChart chart, const std::vector<Eigen::VectorXd>& points,
                                         const std::vector<double>& weights) {
  if (points.empty()) throw DomainError("atomic prior needs at least one point");
  if (points.size() != weights.size()) throw DimensionMismatch("atom points and weights differ in count");
  Eigen::MatrixXd pts(chart.dim(), static_cast<Eigen::Index>(points.size()));
  Eigen::VectorXd w(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != chart.dim()) throw DimensionMismatch("atom has the wrong number of coordinates");
    pts.col(static_cast<Eigen::Index>(i)) = points[i];
    w(static_cast<Eigen::Index>(i)) = weights[i];
  }
  const Support support = natural_support(chart);
  return ParticleEnsemble(std::move(chart), support, std::move(pts), std::move(w), Representation::Atoms);
}

ParticleEnsemble ParticleEnsemble::delta(ParameterChart chart, const Eigen::VectorXd& point) {
  return atoms(std::move(chart), {point}, {1.0});
}

double ParticleEnsemble::effective_sample_size() const { return 1.0 / weights_.squaredNorm(); }

PosteriorSummary ParticleEnsemble::summary() const {
  PosteriorSummary s;
  s.mean = mean();
  const Eigen::MatrixXd centered = points_.colwise() - s.mean;
  s.covariance = centered * weights_.asDiagonal() * centered.transpose();
  s.covariance = 0.5 * (s.covariance + s.covariance.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.covariance);
  const auto d = s.covariance.rows();
  s.axis_lengths.resize(d);
  s.axes.resize(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    s.axis_lengths(k) = std::sqrt(std::max(0.0, es.eigenvalues()(d - 1 - k)));
    s.axes.col(k) = es.eigenvectors().col(d - 1 - k);
  }
  return s;
}

Density1D ParticleEnsemble::density() const {
  if (chart_.kind() != ChartKind::Interval || repr_ != Representation::Grid)
    throw DomainError("only interval grids convert to a one-dimensional density");
  std::vector<double> g(static_cast<std::size_t>(size()));
  for (Eigen::Index i = 0; i < size(); ++i) g[static_cast<std::size_t>(i)] = points_(0, i);
  return Density1D(std::move(g), ProbVector(weights_));
}

Eigen::Index ParticleEnsemble::draw_index(RngStream& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    acc += weights_(i);
    if (u < acc) return i;
  }
  Eigen::Index last = weights_.size() - 1;
  while (last > 0 && weights_(last) == 0.0) --last;
  return last;
}

void ParticleEnsemble::update(const Eigen::VectorXd& w) {
  if (w.size() != chart_.reference_size()) throw DimensionMismatch("likelihood weights do not match the chart");
  const double a = w.dot(chart_.offset());
  const Eigen::VectorXd g = chart_.linear().transpose() * w;
  Eigen::VectorXd lik = (g.transpose() * points_).transpose().array() + a;

  for (Eigen::Index i = 0; i < lik.size(); ++i) {
    double& v = lik(i);
    if (v < -kProbTol && weights_(i) > 0.0) {
      std::ostringstream os;
      os << "likelihood " << v << " at particle " << i << "; particle lies outside the valid region";
      throw RegionViolation(os.str());
    }
    if (std::abs(v) < kLikelihoodSnap || v < 0.0) v = 0.0;
  }
  Eigen::VectorXd next = weights_.cwiseProduct(lik);
  const double total = next.sum();
  if (!(total >= kImpossibleTotal)) throw ImpossibleOutcome("observed outcome has zero probability under the current beliefs");
  weights_ = next / total;

  for (auto& e : evidence_) {
    if (e.a == a && e.g == g) {
      ++e.count;
      return;
    }
  }
  evidence_.push_back({a, g, 1});
}

double ParticleEnsemble::log_target(const Eigen::VectorXd& x) const {
  if (!support_.contains(x)) return -std::numeric_limits<double>::infinity();
  double lp = 0.0;
  for (const auto& e : evidence_) {
    const double v = e.a + e.g.dot(x);
    if (!(v > 0.0)) return -std::numeric_limits<double>::infinity();
    lp += static_cast<double>(e.count) * std::log(v);
  }
  return lp;
}

bool ParticleEnsemble::resample_move(RngStream& rng) {
  if (repr_ != Representation::Particles) return false;
  const auto n = size();
  if (effective_sample_size() >= 0.5 * static_cast<double>(n)) return false;

  const Eigen::VectorXd scale = (kMoveScale * summary().stddev()).cwiseMax(1e-9);

  Eigen::MatrixXd next(points_.rows(), n);
  const double step = 1.0 / static_cast<double>(n);
  double u = rng.uniform() * step;
  double acc = weights_(0);
  Eigen::Index src = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    while (u > acc && src + 1 < n) acc += weights_(++src);
    next.col(k) = points_.col(src);
    u += step;
  }
  points_ = std::move(next);
  weights_ = Eigen::VectorXd::Constant(n, step);

  std::vector<double> lp(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) lp[static_cast<std::size_t>(k)] = log_target(points_.col(k));
  const bool simplex = support_.kind == Support::Kind::Simplex;
  Eigen::VectorXd noise(points_.rows());
  for (int sweep = 0; sweep < kMoveSweeps; ++sweep) {
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index c = 0; c < noise.size(); ++c) noise(c) = scale(c) * rng.normal();
      if (simplex) noise.array() -= noise.mean();
      const Eigen::VectorXd proposal = points_.col(k) + noise;
      const double lq = log_target(proposal);
      if (!std::isfinite(lq)) continue;
      const double accept = lq - lp[static_cast<std::size_t>(k)];
      if (accept >= 0.0 || std::log(rng.uniform()) < accept) {
        points_.col(k) = proposal;
        lp[static_cast<std::size_t>(k)] = lq;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

ParticleEnsemble sample_uniform(const ParameterChart& chart, const Support& support, std::size_t n, RngStream& rng) {
  if (n < 1) throw DomainError("need at least one particle");
  const auto d = chart.dim();
  Eigen::MatrixXd pts(d, static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    Eigen::VectorXd x(d);
    switch (support.kind) {
      case Support::Kind::Interval:
        if (d != 1) throw DimensionMismatch("interval support needs a one-dimensional chart");
        x(0) = support.lo + (support.hi - support.lo) * rng.uniform();
        break;
      case Support::Kind::Ball:
        if (d != 3) throw DimensionMismatch("ball support needs a three-dimensional chart");
        do {
          for (Eigen::Index c = 0; c < 3; ++c) x(c) = 2.0 * rng.uniform() - 1.0;
        } while (x.squaredNorm() > 1.0);
        break;
      case Support::Kind::Simplex:
        for (Eigen::Index c = 0; c < d; ++c) x(c) = -std::log1p(-rng.uniform());
        x /= x.sum();
        break;
    }
    pts.col(static_cast<Eigen::Index>(k)) = x;
  }
  return ParticleEnsemble(chart, support, std::move(pts),
                          Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)),
                          Representation::Particles);
}

ParticleEnsemble bayes_update(const ParticleEnsemble& ens, const PhysicalPostulate& post, const CondProbMatrix& r,
                              Eigen::Index j) {
  ParticleEnsemble next = ens;
  next.update(post.likelihood_weights(r, j));
  return next;
}

PosteriorSummary posterior_summary(const ParticleEnsemble& ens) { return ens.summary(); }

ParticleEnsemble maybe_resample(const ParticleEnsemble& ens, RngStream& rng) {
  ParticleEnsemble next = ens;
  next.resample_move(rng);
  return next;
}

}  // namespace qbagents
