#pragma once

// Generators and independent oracles shared by the unit tests. The oracles
// here deliberately avoid the library's own code paths: hand-rolled 2x2
// complex arithmetic, lgamma-based Beta pdfs, plain quadrature.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qbagents/quantum.hpp"

namespace testsupport {

using C = std::complex<double>;
using M2 = std::array<std::array<C, 2>, 2>;

inline M2 mul(const M2& a, const M2& b) {
  M2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

inline C tr(const M2& a) { return a[0][0] + a[1][1]; }

inline M2 outer(C a, C b) {
  return {{{a * std::conj(a), a * std::conj(b)}, {b * std::conj(a), b * std::conj(b)}}};
}

inline M2 from_eigen(const qbagents::CMatrix& m) { return {{{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}}}; }

/// |psi_i> of the qubit SIC written out from the fiducial by hand.
inline std::array<std::array<C, 2>, 4> sic_kets() {
  const double s3 = std::sqrt(3.0);
  const C a(std::sqrt((3.0 + s3) / 6.0), 0.0);
  const C b = std::sqrt((3.0 - s3) / 6.0) * std::polar(1.0, M_PI / 4.0);
  return {{{a, b}, {a, -b}, {b, a}, {-b, a}}};
}

/// Born probability of a 2x2 operator against a ket projector, by hand.
inline double expect(const M2& op, const std::array<C, 2>& k) {
  return tr(mul(op, outer(k[0], k[1]))).real();
}

inline double beta_pdf(double x, double a, double b) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) + std::lgamma(a + b) - std::lgamma(a) -
                  std::lgamma(b));
}

/// Trapezoid integral of the Beta pdf on [0, x] with n cells. Endpoint
/// singularities (a < 1 or b < 1) are avoided by the callers.
// Trapezoid rule after t = x s^4, which smooths the t^(a-1) corner at 0.
inline double beta_cdf_quadrature(double x, double a, double b, int n = 100000) {
  auto f = [&](double s) { return s == 0.0 ? 0.0 : beta_pdf(x * s * s * s * s, a, b) * 4 * x * s * s * s; };
  const double h = 1.0 / n;
  double sum = 0.5 * (f(0.0) + f(1.0));
  for (int i = 1; i < n; ++i) sum += f(i * h);
  return sum * h;
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

  Eigen::Vector3d ball_point() {
    for (;;) {
      Eigen::Vector3d v(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
      if (v.squaredNorm() <= 1.0) return v;
    }
  }

  /// Random qubit density matrix (Hilbert-Schmidt measure).
  qbagents::CMatrix density() {
    qbagents::CMatrix g(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g(i, j) = C(normal(), normal());
    qbagents::CMatrix r = g * g.adjoint();
    return r / r.trace();
  }

  /// Random m-outcome qubit POVM: D_k = S^-1/2 A_k S^-1/2 with A_k = G G^dag.
  std::vector<qbagents::CMatrix> povm(int m) {
    std::vector<qbagents::CMatrix> a;
    qbagents::CMatrix s = qbagents::CMatrix::Zero(2, 2);
    for (int k = 0; k < m; ++k) {
      qbagents::CMatrix g(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) g(i, j) = C(normal(), normal());
      a.push_back(g * g.adjoint());
      s += a.back();
    }
    Eigen::SelfAdjointEigenSolver<qbagents::CMatrix> es(s);
    const qbagents::CMatrix isq =
        es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
    for (auto& x : a) x = isq * x * isq;
    return a;
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace testsupport
