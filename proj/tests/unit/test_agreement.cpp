#include <doctest.h>

#include "qbagents/agreement.hpp"
#include "qbagents/errors.hpp"
#include "support.hpp"

using namespace qbagents;
using doctest::Approx;

TEST_CASE("expected posterior of Beta priors") {
  CHECK(expected_posterior(BetaParams(1, 1), 0.5).mean() == Approx(0.5).epsilon(1e-15));

  const BetaMixture m = expected_posterior(BetaParams(2, 1), 1.0 / 3);
  CHECK(m.mean() == Approx(7.0 / 12).epsilon(1e-14));
  CHECK(m.w1 + m.w2 == Approx(1.0));
  CHECK(m.cdf(1.0) == Approx(1.0));

  // Quadrature of theta (mB/mA theta + (1-mB)/(1-mA)(1-theta)) 2 theta.
  const double ma = 2.0 / 3, mb = 1.0 / 3;
  const int n = 200000;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double f = t * (mb / ma * t + (1 - mb) / (1 - ma) * (1 - t)) * 2 * t;
    s += (i == 0 || i == n ? 0.5 : 1.0) * f;
  }
  CHECK(m.mean() == Approx(s / n).epsilon(1e-9));

  // Appendix weights for Beta(k+1, N-k+1) against Beta(l+1, N-l+1).
  const int k = 4, l = 1, nn = 7;
  const BetaMixture e = expected_posterior(BetaParams(k + 1, nn - k + 1), beta_mean(BetaParams(l + 1, nn - l + 1)));
  CHECK(e.w1 == Approx((l + 1.0) / (nn + 2)));
  CHECK(e.w2 == Approx((nn - l + 1.0) / (nn + 2)));
  CHECK(e.c1.alpha == k + 2);
  CHECK(e.c2.beta == nn - k + 2);

  CHECK_THROWS_AS(expected_posterior(BetaParams(1, 1), 0.0), DomainError);
  CHECK_THROWS_AS(expected_posterior(BetaParams(1, 1), 1.0), DomainError);
}

TEST_CASE("expected posterior of grid densities") {
  const Density1D a = Density1D::from_beta(BetaParams(2, 1));
  const Density1D e = expected_posterior(a, 1.0 / 3);
  CHECK(e.mean() == Approx(7.0 / 12).epsilon(1e-6));
  CHECK(e.weights().vector().sum() == Approx(1.0).epsilon(1e-12));
  CHECK_THROWS(expected_posterior(Density1D::from_pdf([](double t) { return t == 1.0 ? 1.0 : 0.0; }), 0.5));
}

TEST_CASE("property: expected posterior matches a simulated interaction step") {
  const Density1D a = Density1D::from_pdf([](double t) { return std::sqrt(std::max(0.0, 1 - (2 * t - 1) * (2 * t - 1))); }, 2001);
  const double mb = 0.7;
  const Density1D e = expected_posterior(a, mb);
  // Posterior means after heads and tails, from the density directly.
  double m1 = 0, m2 = 0, z1 = 0, z2 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a.grid()[i], w = a.weights()[i];
    m1 += t * t * w;
    z1 += t * w;
    m2 += t * (1 - t) * w;
    z2 += (1 - t) * w;
  }
  const double after_heads = m1 / z1, after_tails = m2 / z2;
  std::mt19937_64 eng(1);
  std::bernoulli_distribution heads(mb);
  const int n = 100000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double v = heads(eng) ? after_heads : after_tails;
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n, sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(e.mean() - mean) < 3 * sd / std::sqrt(n));
}

TEST_CASE("mean contraction") {
  const auto [b0, a0] = mean_contraction_gap(BetaParams(3, 3), BetaParams(2, 2));
  CHECK(b0 == 0.0);
  CHECK(a0 == 0.0);
  const auto [before, after] = mean_contraction_gap(BetaParams(2, 1), BetaParams(1, 2));
  CHECK(before == Approx(1.0 / 3));
  CHECK(after == Approx(1.0 / 4));

  testsupport::Gen gen(31);
  for (int i = 0; i < 10000; ++i) {
    auto draw = [&] { return std::exp(gen.uniform(std::log(0.05), std::log(50.0))); };
    const auto [x, y] = mean_contraction_gap(BetaParams(draw(), draw()), BetaParams(draw(), draw()));
    CHECK(y <= x + 1e-12);
  }
}

TEST_CASE("chi examples") {
  CHECK(chi(0.5, 1, 0, 1) == Approx(0.125).epsilon(1e-14));
  testsupport::Gen gen(2);
  for (int t = 0; t < 200; ++t) {
    const int n = gen.integer(1, 25), k = gen.integer(1, n), l = gen.integer(0, k - 1);
    CHECK(chi(0.0, k, l, n) == 0.0);
    CHECK(chi(1.0, k, l, n) == 0.0);
  }
  CHECK_THROWS_AS(chi(0.5, 1, 1, 3), DomainError);
  CHECK_THROWS_AS(chi(1.5, 2, 1, 3), DomainError);
  CHECK_THROWS_AS(chi(0.5, 4, 1, 3), DomainError);
}

TEST_CASE("chi is nonnegative on the grid for N <= 25") {
  double worst = 1.0;
  for (int n = 1; n <= 25; ++n)
    for (int k = 1; k <= n; ++k)
      for (int l = 0; l < k; ++l)
        for (int i = 0; i <= 100; ++i) worst = std::min(worst, chi(i / 100.0, k, l, n));
  CHECK(worst >= -1e-12);
}

TEST_CASE("chi decomposition into two prefactored sums") {
  testsupport::Gen gen(3);
  for (int t = 0; t < 500; ++t) {
    const int n = gen.integer(1, 25), k = gen.integer(1, n), l = gen.integer(0, k - 1);
    const double x = gen.uniform(0.01, 0.99);
    const double rebuilt = (1 - x) * chi_first_prefactor(x, l, n) * chi_first_sum(x, k, l, n) +
                           x * chi_second_prefactor(x, k, n) * chi_second_sum(x, k, l, n);
    CHECK(rebuilt == Approx(chi(x, k, l, n)).epsilon(1e-9).scale(1e-20));
    CHECK(chi_first_prefactor(x, l, n) >= 0.0);
    CHECK(chi_second_prefactor(x, k, n) >= 0.0);
  }
  for (int n = 1; n <= 25; ++n)
    for (int k = 1; k <= n; ++k)
      for (int l = 0; l < k; ++l) {
        CHECK(chi_first_sum(0.0, k, l, n) == Approx(n + 1 - k));
        CHECK(chi_second_sum(1.0, k, l, n) == Approx(l + 1));
      }
}

TEST_CASE("Kolmogorov contraction check") {
  const KolmogorovCheck same = kolmogorov_contraction_check(3, 3, 6);
  CHECK(same.prior == 0.0);
  CHECK(same.expected == 0.0);

  // N = 1, k = 1, l = 0: CDF oracles written out from the mixtures.
  double kp = 0, ke = 0;
  for (int i = 0; i <= 10000; ++i) {
    const double x = i / 10000.0;
    kp = std::max(kp, std::abs(x * x - (2 * x - x * x)));
    const double fa = x * x * x / 3 + 2.0 / 3 * (3 * x * x - 2 * x * x * x);
    const double fb = 2.0 / 3 * (3 * x * x - 2 * x * x * x) + (1 - std::pow(1 - x, 3)) / 3;
    ke = std::max(ke, std::abs(fa - fb));
  }
  const KolmogorovCheck c = kolmogorov_contraction_check(1, 0, 1);
  CHECK(c.prior == Approx(kp).epsilon(1e-8));
  CHECK(c.expected == Approx(ke).epsilon(1e-8));
  CHECK(c.prior >= c.expected);

  const KolmogorovCheck m = kolmogorov_contraction_check(0, 1, 1);
  CHECK(m.prior == Approx(c.prior).epsilon(1e-12));
  CHECK(m.expected == Approx(c.expected).epsilon(1e-12));
  CHECK_THROWS(kolmogorov_contraction_check(2, 0, 1));
}

TEST_CASE("verify_appendix on a reduced configuration") {
  AppendixConfig cfg;
  cfg.chi_max_n = 8;
  cfg.kolmogorov_max_n = 5;
  cfg.random_pairs = 500;
  const auto rows = verify_appendix(cfg);
  CHECK(rows.size() == 5);
  for (const auto& r : rows) {
    INFO(r.name);
    CHECK(r.pass);
    CHECK(r.cases > 0);
  }
}
