#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <vector>

namespace qbagents {

/// Normalization tolerance for probability vectors and stochastic matrices.
inline constexpr double kProbTol = 1e-9;

/// A finite probability distribution.
///
/// Construction rejects entries below -kProbTol and sums off by more than
/// kProbTol. Entries in [-kProbTol, 0) are clamped to zero and the result is
/// renormalized, which absorbs drift from long update chains.
class ProbVector {
 public:
  ProbVector() = default;
  explicit ProbVector(Eigen::VectorXd entries);
  ProbVector(std::initializer_list<double> entries);

  std::size_t size() const { return static_cast<std::size_t>(p_.size()); }
  double operator[](std::size_t i) const { return p_(static_cast<Eigen::Index>(i)); }
  const Eigen::VectorXd& vector() const { return p_; }

 private:
  Eigen::VectorXd p_;
};

/// R(j|i): row j is an outcome of the action, column i an outcome of the
/// reference action. Every column is a distribution over j.
class CondProbMatrix {
 public:
  CondProbMatrix() = default;
  explicit CondProbMatrix(Eigen::MatrixXd m);

  Eigen::Index outcomes() const { return m_.rows(); }
  Eigen::Index reference_size() const { return m_.cols(); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double operator()(Eigen::Index j, Eigen::Index i) const { return m_(j, i); }

 private:
  Eigen::MatrixXd m_;
};

struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;

  BetaParams() = default;
  BetaParams(double a, double b);
};

/// Weighted grid over [0, 1]. weights[i] is the probability mass carried by
/// grid point i, so the CDF at grid[i] is the prefix sum through i.
class Density1D {
 public:
  Density1D(std::vector<double> grid, ProbVector weights);

  static constexpr std::size_t kDefaultGridSize = 10001;
  static std::vector<double> uniform_grid(std::size_t n = kDefaultGridSize);
  /// Weights proportional to `pdf` sampled at the grid points.
  static Density1D from_pdf(const std::function<double(double)>& pdf,
                            std::size_t n = kDefaultGridSize);
  /// Cell masses I_{x+h/2} - I_{x-h/2} of a Beta distribution.
  static Density1D from_beta(const BetaParams& beta, std::size_t n = kDefaultGridSize);

  const std::vector<double>& grid() const { return grid_; }
  const ProbVector& weights() const { return weights_; }
  std::size_t size() const { return grid_.size(); }

  std::vector<double> cdf() const;
  double mean() const;
  double variance() const;
  /// Point values of a density whose trapezoid integral over the grid is 1.
  std::vector<double> pdf_values() const;

 private:
  std::vector<double> grid_;
  ProbVector weights_;
};

double regularized_incomplete_beta(double x, double a, double b);
double beta_cdf(const BetaParams& p, double x);
double beta_mean(const BetaParams& p);
double beta_variance(const BetaParams& p);
BetaParams beta_posterior(const BetaParams& prior, long long heads, long long tails);

/// sup_x |F(x) - G(x)| over [0, 1]. The two CDFs are scanned on a uniform
/// grid and every local maximum is polished with a Brent line search.
double sup_abs_difference(const std::function<double(double)>& f,
                          const std::function<double(double)>& g,
                          std::size_t scan_points = 10001);

double kolmogorov_distance(const Density1D& a, const Density1D& b);
double kolmogorov_distance(const BetaParams& a, const BetaParams& b);
double kolmogorov_distance(const Density1D& a, const BetaParams& b);
double kolmogorov_distance(const BetaParams& a, const Density1D& b);

/// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace qbagents
