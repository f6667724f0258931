#include <doctest.h>

#include "qbagents/core_math.hpp"
#include "qbagents/errors.hpp"
#include "support.hpp"

using namespace qbagents;
using doctest::Approx;

TEST_CASE("ProbVector validates and absorbs tiny drift") {
  ProbVector p{0.25, 0.75};
  CHECK(p.size() == 2);
  CHECK(p[1] == 0.75);

  ProbVector q{-5e-10, 1.0};
  CHECK(q[0] == 0.0);
  CHECK(q[1] == 1.0);

  CHECK_THROWS_AS(ProbVector({-0.1, 1.1}), DomainError);
  CHECK_THROWS_AS(ProbVector({0.5, 0.6}), DomainError);
  CHECK_THROWS(ProbVector(Eigen::VectorXd()));
}

TEST_CASE("CondProbMatrix columns must be distributions") {
  Eigen::MatrixXd m(2, 2);
  m << 0.3, 0.9, 0.7, 0.1;
  CHECK_NOTHROW(CondProbMatrix{m});
  m(0, 0) = 0.4;
  CHECK_THROWS_AS(CondProbMatrix{m}, DomainError);
  m << -0.1, 0.5, 1.1, 0.5;
  CHECK_THROWS_AS(CondProbMatrix{m}, DomainError);
}

TEST_CASE("BetaParams rejects nonpositive parameters") {
  CHECK_THROWS_AS(BetaParams(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(BetaParams(1.0, -2.0), DomainError);
}

TEST_CASE("regularized incomplete Beta") {
  CHECK(regularized_incomplete_beta(0.0, 2.5, 3.0) == 0.0);
  CHECK(regularized_incomplete_beta(1.0, 2.5, 3.0) == 1.0);
  CHECK(regularized_incomplete_beta(0.5, 1.0, 1.0) == Approx(0.5).epsilon(1e-15));
  CHECK(regularized_incomplete_beta(0.5, 2.0, 2.0) == Approx(0.5).epsilon(1e-14));
  CHECK(regularized_incomplete_beta(0.5, 2.0, 2.0) ==
        Approx(testsupport::beta_cdf_quadrature(0.5, 2.0, 2.0)).epsilon(1e-9));
  CHECK_THROWS_AS(regularized_incomplete_beta(1.5, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(regularized_incomplete_beta(0.5, 0.0, 1.0), DomainError);
}

TEST_CASE("integer-parameter I_x equals the finite binomial sum") {
  // I_x(k+1, N-k+1) = sum_{j=k+1}^{N+1} C(N+1, j) x^j (1-x)^{N+1-j}
  for (int n = 0; n <= 12; ++n)
    for (int k = 0; k <= n; ++k)
      for (double x : {0.1, 0.37, 0.5, 0.81}) {
        double s = 0.0;
        for (int j = k + 1; j <= n + 1; ++j)
          s += std::exp(std::lgamma(n + 2.0) - std::lgamma(j + 1.0) - std::lgamma(n + 2.0 - j)) * std::pow(x, j) *
               std::pow(1 - x, n + 1 - j);
        CHECK(regularized_incomplete_beta(x, k + 1.0, n - k + 1.0) == Approx(s).epsilon(1e-12));
      }
}

TEST_CASE("property: I_x matches trapezoid quadrature and is monotone") {
  testsupport::Gen gen(11);
  for (int trial = 0; trial < 40; ++trial) {
    // a, b >= 1 keeps the pdf bounded so the trapezoid oracle converges.
    const double a = gen.uniform(1.0, 8.0);
    const double b = gen.uniform(1.0, 8.0);
    const double x = gen.uniform(0.05, 0.95);
    CHECK(regularized_incomplete_beta(x, a, b) == Approx(testsupport::beta_cdf_quadrature(x, a, b)).epsilon(1e-9));
    double prev = 0.0;
    for (int i = 0; i <= 50; ++i) {
      const double v = regularized_incomplete_beta(i / 50.0, a, b);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("Beta posterior and mean") {
  const BetaParams post = beta_posterior(BetaParams(1, 1), 771, 229);
  CHECK(post.alpha == 772.0);
  CHECK(post.beta == 230.0);
  CHECK(beta_mean(post) == Approx(0.7705).epsilon(1e-4));
  CHECK(beta_mean(post) == Approx(772.0 / 1002.0).epsilon(1e-15));
  const BetaParams same = beta_posterior(BetaParams(1, 1), 0, 0);
  CHECK(same.alpha == 1.0);
  CHECK(same.beta == 1.0);
  const BetaParams inc = beta_posterior(BetaParams(2, 3), 1, 0);
  CHECK(inc.alpha == 3.0);
  CHECK(inc.beta == 3.0);
  CHECK(beta_mean(BetaParams(1, 1)) == 0.5);
  CHECK(beta_mean(BetaParams(2, 1)) == Approx(2.0 / 3.0));
  CHECK_THROWS(beta_posterior(BetaParams(1, 1), -1, 0));
}

TEST_CASE("property: beta_mean in (0,1) for random parameters") {
  testsupport::Gen gen(5);
  for (int i = 0; i < 1000; ++i) {
    const double a = std::exp(gen.uniform(-5, 5));
    const double b = std::exp(gen.uniform(-5, 5));
    const double m = beta_mean(BetaParams(a, b));
    CHECK(m > 0.0);
    CHECK(m < 1.0);
  }
}

TEST_CASE("Density1D grid, normalization and moments") {
  const auto g = Density1D::uniform_grid();
  CHECK(g.size() == 10001);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 1.0);
  const Density1D d = Density1D::from_beta(BetaParams(3, 5));
  CHECK(d.mean() == Approx(3.0 / 8.0).epsilon(1e-6));
  CHECK(d.variance() == Approx(beta_variance(BetaParams(3, 5))).epsilon(1e-5));
  // Trapezoid integral of the reported pdf is one.
  const auto pdf = d.pdf_values();
  double s = 0.0;
  for (std::size_t i = 1; i < pdf.size(); ++i) s += 0.5 * (pdf[i] + pdf[i - 1]) * (g[i] - g[i - 1]);
  CHECK(s == Approx(1.0).epsilon(1e-9));
  CHECK_THROWS(Density1D({0.0, 0.5, 0.4}, ProbVector{0.2, 0.3, 0.5}));
  CHECK_THROWS(Density1D({0.0, 0.5}, ProbVector{0.2, 0.3, 0.5}));
}

TEST_CASE("Kolmogorov distance examples") {
  CHECK(kolmogorov_distance(BetaParams(1, 1), BetaParams(1, 1)) == 0.0);
  // CDFs x^2 and 2x - x^2: difference 2x - 2x^2 peaks at 1/2.
  CHECK(kolmogorov_distance(BetaParams(2, 1), BetaParams(1, 2)) == Approx(0.5).epsilon(1e-12));
  const Density1D u = Density1D::from_pdf([](double) { return 1.0; });
  CHECK(kolmogorov_distance(u, BetaParams(1, 1)) < 2e-4);
  CHECK(kolmogorov_distance(u, u) == 0.0);
  const Density1D coarse = Density1D::from_pdf([](double) { return 1.0; }, 11);
  CHECK_THROWS(kolmogorov_distance(u, coarse));
}

TEST_CASE("property: Kolmogorov distance is symmetric and satisfies the triangle inequality") {
  testsupport::Gen gen(17);
  auto draw = [&] { return BetaParams(std::exp(gen.uniform(-1.5, 2.5)), std::exp(gen.uniform(-1.5, 2.5))); };
  for (int i = 0; i < 150; ++i) {
    const BetaParams a = draw(), b = draw(), c = draw();
    const double ab = kolmogorov_distance(a, b);
    CHECK(ab == kolmogorov_distance(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(ab <= kolmogorov_distance(a, c) + kolmogorov_distance(c, b) + 1e-12);
  }
}

TEST_CASE("CompensatedSum recovers cancelled terms") {
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1.0);
}
