#include "qbagents/core_math.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qbagents/errors.hpp"

namespace qbagents {

ProbVector::ProbVector(Eigen::VectorXd entries) : p_(std::move(entries)) {
  if (p_.size() == 0) throw DomainError("probability vector must be nonempty");
  for (Eigen::Index i = 0; i < p_.size(); ++i) {
    if (!std::isfinite(p_(i)) || p_(i) < -kProbTol || p_(i) > 1.0 + kProbTol) {
      std::ostringstream os;
      os << "probability entry " << i << " = " << p_(i) << " outside [0, 1]";
      throw DomainError(os.str());
    }
    if (p_(i) < 0.0) p_(i) = 0.0;
  }
  const double total = p_.sum();
  if (std::abs(total - 1.0) > kProbTol) {
    std::ostringstream os;
    os << "probability vector sums to " << total;
    throw DomainError(os.str());
  }
  p_ /= total;
}

ProbVector::ProbVector(std::initializer_list<double> entries)
    : ProbVector(Eigen::Map<const Eigen::VectorXd>(entries.begin(),
                                                   static_cast<Eigen::Index>(entries.size()))) {}

CondProbMatrix::CondProbMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.cols() == 0) throw DomainError("conditional matrix must be nonempty");
  for (Eigen::Index i = 0; i < m_.cols(); ++i) {
    for (Eigen::Index j = 0; j < m_.rows(); ++j) {
      double& v = m_(j, i);
      if (!std::isfinite(v) || v < -kProbTol || v > 1.0 + kProbTol) {
        std::ostringstream os;
        os << "conditional probability R(" << j << "|" << i << ") = " << v << " outside [0, 1]";
        throw DomainError(os.str());
      }
      if (v < 0.0) v = 0.0;
    }
    const double total = m_.col(i).sum();
    if (std::abs(total - 1.0) > kProbTol) {
      std::ostringstream os;
      os << "column " << i << " of conditional matrix sums to " << total;
      throw DomainError(os.str());
    }
    m_.col(i) /= total;
  }
}

BetaParams::BetaParams(double a, double b) : alpha(a), beta(b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError("Beta parameters must be positive and finite");
}

// ---------------------------------------------------------------------------

Density1D::Density1D(std::vector<double> grid, ProbVector weights)
    : grid_(std::move(grid)), weights_(std::move(weights)) {
  if (grid_.empty()) throw DomainError("density grid is empty");
  if (grid_.size() != weights_.size())
    throw DimensionMismatch("density grid and weights differ in length");
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (grid_[i] < 0.0 || grid_[i] > 1.0) throw DomainError("density grid point outside [0, 1]");
    if (i > 0 && !(grid_[i] > grid_[i - 1]))
      throw DomainError("density grid must be strictly increasing");
  }
}

std::vector<double> Density1D::uniform_grid(std::size_t n) {
  if (n < 2) throw DomainError("grid needs at least two points");
  std::vector<double> g(n);
  const double step = 1.0 / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<double>(i) * step;
  g.back() = 1.0;
  return g;
}

Density1D Density1D::from_pdf(const std::function<double(double)>& pdf, std::size_t n) {
  auto g = uniform_grid(n);
  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double v = pdf(g[i]);
    if (!std::isfinite(v) || v < 0.0) throw DomainError("pdf must be finite and nonnegative on the grid");
    w(static_cast<Eigen::Index>(i)) = v;
  }
  const double total = w.sum();
  if (!(total > 0.0)) throw DomainError("pdf has no mass on the grid");
  return Density1D(std::move(g), ProbVector(w / total));
}

Density1D Density1D::from_beta(const BetaParams& beta, std::size_t n) {
  auto g = uniform_grid(n);
  const double half = 0.5 / static_cast<double>(n - 1);
  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = std::max(0.0, g[i] - half);
    const double hi = std::min(1.0, g[i] + half);
    w(static_cast<Eigen::Index>(i)) = beta_cdf(beta, hi) - beta_cdf(beta, lo);
  }
  w = w.cwiseMax(0.0);
  return Density1D(std::move(g), ProbVector(w / w.sum()));
}

std::vector<double> Density1D::cdf() const {
  std::vector<double> c(grid_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    acc += weights_[i];
    c[i] = acc;
  }
  return c;
}

double Density1D::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) m += weights_[i] * grid_[i];
  return m;
}

double Density1D::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) v += weights_[i] * (grid_[i] - m) * (grid_[i] - m);
  return v;
}

std::vector<double> Density1D::pdf_values() const {
  std::vector<double> out(grid_.size());
  if (grid_.size() == 1) {
    out[0] = 1.0;
    return out;
  }
  double integral = 0.0;
  for (std::size_t i = 1; i < grid_.size(); ++i)
    integral += 0.5 * (weights_[i] + weights_[i - 1]) * (grid_[i] - grid_[i - 1]);
  for (std::size_t i = 0; i < grid_.size(); ++i) out[i] = integral > 0.0 ? weights_[i] / integral : 0.0;
  return out;
}

// ---------------------------------------------------------------------------

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete Beta argument outside [0, 1]");
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete Beta shape parameters must be positive");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

double beta_cdf(const BetaParams& p, double x) { return regularized_incomplete_beta(x, p.alpha, p.beta); }

double beta_mean(const BetaParams& p) { return p.alpha / (p.alpha + p.beta); }

double beta_variance(const BetaParams& p) {
  const double s = p.alpha + p.beta;
  return p.alpha * p.beta / (s * s * (s + 1.0));
}

BetaParams beta_posterior(const BetaParams& prior, long long heads, long long tails) {
  if (heads < 0 || tails < 0) throw DomainError("outcome counts must be nonnegative");
  return {prior.alpha + static_cast<double>(heads), prior.beta + static_cast<double>(tails)};
}

// ---------------------------------------------------------------------------

double sup_abs_difference(const std::function<double(double)>& f,
                          const std::function<double(double)>& g,
                          std::size_t scan_points) {
  if (scan_points < 3) scan_points = 3;
  const auto xs = Density1D::uniform_grid(scan_points);
  std::vector<double> d(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) d[i] = std::abs(f(xs[i]) - g(xs[i]));

  double best = *std::max_element(d.begin(), d.end());
  const auto neg_abs = [&](double x) { return -std::abs(f(x) - g(x)); };
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    if (d[i] >= d[i - 1] && d[i] >= d[i + 1] && d[i] > 0.0) {
      const auto r = boost::math::tools::brent_find_minima(neg_abs, xs[i - 1], xs[i + 1], 52);
      best = std::max(best, -r.second);
    }
  }
  return best;
}

namespace {

void require_same_grid(const Density1D& a, const Density1D& b) {
  if (a.size() != b.size()) throw DimensionMismatch("Kolmogorov distance needs matching grids");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.grid()[i] != b.grid()[i]) throw DimensionMismatch("Kolmogorov distance needs matching grids");
}

}  // namespace

double kolmogorov_distance(const Density1D& a, const Density1D& b) {
  require_same_grid(a, b);
  const auto ca = a.cdf();
  const auto cb = b.cdf();
  double k = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) k = std::max(k, std::abs(ca[i] - cb[i]));
  return std::min(k, 1.0);
}

double kolmogorov_distance(const BetaParams& a, const BetaParams& b) {
  return sup_abs_difference([&](double x) { return beta_cdf(a, x); },
                            [&](double x) { return beta_cdf(b, x); });
}

double kolmogorov_distance(const Density1D& a, const BetaParams& b) {
  const auto ca = a.cdf();
  double k = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) k = std::max(k, std::abs(ca[i] - beta_cdf(b, a.grid()[i])));
  return std::min(k, 1.0);
}

double kolmogorov_distance(const BetaParams& a, const Density1D& b) { return kolmogorov_distance(b, a); }

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

}  // namespace qbagents
