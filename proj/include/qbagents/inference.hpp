#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "qbagents/core_math.hpp"
#include "qbagents/postulate.hpp"
#include "qbagents/quantum.hpp"
#include "qbagents/rng.hpp"

namespace qbagents {

/// Likelihood values with magnitude below this are treated as exact zeros.
inline constexpr double kLikelihoodSnap = 1e-12;
inline constexpr double kImpossibleTotal = 1e-300;

enum class ChartKind { Interval, Bloch, Simplex };

/// Affine coordinates on a set of reference probability vectors:
/// p = offset + linear * x.
///
///   Interval  x = theta,      p = (theta, 1 - theta)
///   Bloch     x = (a, b, c),  p = Born probabilities of (I + x.sigma)/2
///   Simplex   x = p
class ParameterChart {
 public:
  static ParameterChart interval();
  static ParameterChart bloch(const ReferenceAction& ref);
  static ParameterChart simplex(std::size_t n);

  ChartKind kind() const { return kind_; }
  Eigen::Index dim() const { return linear_.cols(); }
  Eigen::Index reference_size() const { return linear_.rows(); }
  const Eigen::VectorXd& offset() const { return offset_; }
  const Eigen::MatrixXd& linear() const { return linear_; }

  Eigen::VectorXd raw_probabilities(const Eigen::VectorXd& x) const { return offset_ + linear_ * x; }
  ProbVector probabilities(const Eigen::VectorXd& x) const { return ProbVector(raw_probabilities(x)); }

 private:
  ParameterChart(ChartKind kind, Eigen::VectorXd offset, Eigen::MatrixXd linear)
      : kind_(kind), offset_(std::move(offset)), linear_(std::move(linear)) {}

  ChartKind kind_;
  Eigen::VectorXd offset_;
  Eigen::MatrixXd linear_;
};

/// Region carrying the prior mass, in chart coordinates.
struct Support {
  enum class Kind { Interval, Ball, Simplex };
  Kind kind = Kind::Interval;
  double lo = 0.0;
  double hi = 1.0;

  static Support interval(double lo, double hi);
  static Support ball() { return {Kind::Ball, 0.0, 1.0}; }
  static Support simplex() { return {Kind::Simplex, 0.0, 1.0}; }

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
};

enum class Representation { Grid, Particles, Atoms };

/// Accumulated likelihood factor (a + g.x)^count.
struct Evidence {
  double a = 0.0;
  Eigen::VectorXd g;
  long long count = 0;
};

struct PosteriorSummary {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  /// Square roots of the covariance eigenvalues, descending.
  Eigen::VectorXd axis_lengths;
  /// Unit eigenvectors as columns, matching axis_lengths.
  Eigen::MatrixXd axes;

  double semi_major() const { return axis_lengths.size() ? axis_lengths(0) : 0.0; }
  Eigen::VectorXd stddev() const { return covariance.diagonal().cwiseMax(0.0).cwiseSqrt(); }
};

/// A de Finetti density over a parameter region held as weighted points.
/// Grids are used for one-dimensional priors, particles (with resample-move)
/// for the ball and simplex, atoms for delta mixtures.
class ParticleEnsemble {
 public:
  ParticleEnsemble(ParameterChart chart, Support support, Eigen::MatrixXd points, Eigen::VectorXd weights,
                   Representation repr);

  /// Weights proportional to pdf(theta) on [lo, hi], zero elsewhere on a uniform [0, 1] grid.
  static ParticleEnsemble grid(const std::function<double(double)>& pdf, double lo = 0.0, double hi = 1.0,
                               std::size_t n = Density1D::kDefaultGridSize);
  static ParticleEnsemble grid(const Density1D& density);
  static ParticleEnsemble atoms(ParameterChart chart, const std::vector<Eigen::VectorXd>& points,
                                const std::vector<double>& weights);
  static ParticleEnsemble delta(ParameterChart chart, const Eigen::VectorXd& point);

  const ParameterChart& chart() const { return chart_; }
  const Support& support() const { return support_; }
  Representation representation() const { return repr_; }
  Eigen::Index size() const { return points_.cols(); }
  Eigen::Index dim() const { return points_.rows(); }
  const Eigen::MatrixXd& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const std::vector<Evidence>& evidence() const { return evidence_; }

  double effective_sample_size() const;
  Eigen::VectorXd mean() const { return points_ * weights_; }
  ProbVector mean_probabilities() const { return chart_.probabilities(mean()); }
  PosteriorSummary summary() const;
  /// Interval grids only.
  Density1D density() const;
  /// Index drawn with probability equal to its weight.
  Eigen::Index draw_index(RngStream& rng) const;

  /// Multiplies weight i by w . p(x_i) and renormalizes. `w` is a row of R Phi.
  void update(const Eigen::VectorXd& w);
  /// Resample-move when ESS < n/2. Returns whether a resample happened.
  bool resample_move(RngStream& rng);

  static constexpr int kMoveSweeps = 10;
  static constexpr double kMoveScale = 0.5;

 private:
  double log_target(const Eigen::VectorXd& x) const;

  ParameterChart chart_;
  Support support_;
  Eigen::MatrixXd points_;
  Eigen::VectorXd weights_;
  Representation repr_;
  std::vector<Evidence> evidence_;
};

/// i.i.d. uniform points (Lebesgue measure on the support), equal weights.
ParticleEnsemble sample_uniform(const ParameterChart& chart, const Support& support, std::size_t n,
                                RngStream& rng);

ParticleEnsemble bayes_update(const ParticleEnsemble& ens, const PhysicalPostulate& post, const CondProbMatrix& r,
                              Eigen::Index j);

PosteriorSummary posterior_summary(const ParticleEnsemble& ens);

ParticleEnsemble maybe_resample(const ParticleEnsemble& ens, RngStream& rng);

}  // namespace qbagents
