#include "qbagents/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qbagents/errors.hpp"
#include "qbagents/rng.hpp"

namespace qbagents {

double BetaMixture::mean() const { return w1 * beta_mean(c1) + w2 * beta_mean(c2); }

double BetaMixture::cdf(double x) const { return w1 * beta_cdf(c1, x) + w2 * beta_cdf(c2, x); }

namespace {

void require_interior(double m, const char* what) {
  if (!(m > 0.0 && m < 1.0)) throw DomainError(std::string(what) + " must lie strictly inside (0, 1)");
}

}  // namespace

BetaMixture expected_posterior(const BetaParams& prior_a, double mean_b) {
  require_interior(mean_b, "other agent's mean");
  return {mean_b, BetaParams(prior_a.alpha + 1.0, prior_a.beta), 1.0 - mean_b,
          BetaParams(prior_a.alpha, prior_a.beta + 1.0)};
}

Density1D expected_posterior(const Density1D& prior_a, double mean_b) {
  require_interior(mean_b, "other agent's mean");
  const double mean_a = prior_a.mean();
  require_interior(mean_a, "prior mean");
  Eigen::VectorXd w(static_cast<Eigen::Index>(prior_a.size()));
  for (std::size_t i = 0; i < prior_a.size(); ++i) {
    const double t = prior_a.grid()[i];
    w(static_cast<Eigen::Index>(i)) =
        (mean_b / mean_a * t + (1.0 - mean_b) / (1.0 - mean_a) * (1.0 - t)) * prior_a.weights()[i];
  }
  return Density1D(prior_a.grid(), ProbVector(std::move(w)));
}

std::pair<double, double> mean_contraction_gap(const BetaParams& prior_a, const BetaParams& prior_b) {
  const double ma = beta_mean(prior_a);
  const double mb = beta_mean(prior_b);
  if (ma == mb) return {0.0, 0.0};
  return {std::abs(mb - ma), std::abs(mb - expected_posterior(prior_a, mb).mean())};
}

std::pair<double, double> mean_contraction_gap(const Density1D& prior_a, const Density1D& prior_b) {
  const double ma = prior_a.mean();
  const double mb = prior_b.mean();
  if (ma == mb) return {0.0, 0.0};
  return {std::abs(mb - ma), std::abs(mb - expected_posterior(prior_a, mb).mean())};
}

// ---------------------------------------------------------------------------

namespace {

void require_chi_domain(double x, int k, int l, int n) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("chi needs x in [0, 1]");
  if (!(0 <= l && l < k && k <= n)) throw DomainError("chi needs 0 <= l < k <= N");
}

double log_factorial(int m) { return std::lgamma(static_cast<double>(m) + 1.0); }

// x^a (1-x)^b / (c! d!), with 0^0 = 1.
double term(double x, int a, int b, int c, int d) {
  if ((x == 0.0 && a > 0) || (x == 1.0 && b > 0)) return 0.0;
  double lg = -log_factorial(c) - log_factorial(d);
  if (a > 0) lg += a * std::log(x);
  if (b > 0) lg += b * std::log1p(-x);
  return std::exp(lg);
}

}  // namespace

double chi(double x, int k, int l, int n) {
  require_chi_domain(x, k, l, n);
  CompensatedSum s;
  for (int j = l + 1; j <= k; ++j) s.add(term(x, j, n + 1 - j, j, n + 1 - j));
  const double boundary = term(x, l + 1, n + 1 - l, l + 1, n + 1 - l) + term(x, k + 1, n + 1 - k, k + 1, n + 1 - k);
  s.add(-static_cast<double>(k - l) * boundary);
  return s.value();
}

double chi_first_prefactor(double x, int l, int n) { return term(x, l + 1, n - l, l + 1, n + 1 - l); }

double chi_second_prefactor(double x, int k, int n) { return term(x, k, n + 1 - k, k + 1, n + 1 - k); }

double chi_first_sum(double x, int k, int l, int n) {
  require_chi_domain(x, k, l, n);
  if (x == 1.0) return std::numeric_limits<double>::infinity();
  CompensatedSum s;
  for (int j = l + 1; j <= k; ++j) {
    const int e = j - (l + 1);
    const double lratio = log_factorial(l + 1) + log_factorial(n + 1 - l) - log_factorial(j) - log_factorial(n + 1 - j);
    double power = 1.0;
    if (e > 0) power = x == 0.0 ? 0.0 : std::exp(e * (std::log(x) - std::log1p(-x)));
    s.add(power * std::exp(lratio) - 1.0);
  }
  return s.value();
}

double chi_second_sum(double x, int k, int l, int n) {
  require_chi_domain(x, k, l, n);
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  CompensatedSum s;
  for (int j = l + 1; j <= k; ++j) {
    const int e = k - j;
    const double lratio = log_factorial(k + 1) + log_factorial(n + 1 - k) - log_factorial(j) - log_factorial(n + 1 - j);
    double power = 1.0;
    if (e > 0) power = x == 1.0 ? 0.0 : std::exp(e * (std::log1p(-x) - std::log(x)));
    s.add(power * std::exp(lratio) - 1.0);
  }
  return s.value();
}

KolmogorovCheck kolmogorov_contraction_check(int k, int l, int n, std::size_t scan_points) {
  if (!(0 <= k && k <= n && 0 <= l && l <= n)) throw DomainError("Kolmogorov check needs 0 <= k, l <= N");
  if (k == l) return {0.0, 0.0};
  const BetaParams pa(k + 1.0, n - k + 1.0);
  const BetaParams pb(l + 1.0, n - l + 1.0);
  const BetaMixture ea = expected_posterior(pa, beta_mean(pb));
  const BetaMixture eb = expected_posterior(pb, beta_mean(pa));
  KolmogorovCheck c;
  c.prior = sup_abs_difference([&](double x) { return beta_cdf(pa, x); }, [&](double x) { return beta_cdf(pb, x); },
                               scan_points);
  c.expected = sup_abs_difference([&](double x) { return ea.cdf(x); }, [&](double x) { return eb.cdf(x); }, scan_points);
  return c;
}

// ---------------------------------------------------------------------------

std::vector<AppendixRow> verify_appendix(const AppendixConfig& cfg) {
  std::vector<AppendixRow> rows;

  {
    AppendixRow r{"mean contraction (random Beta pairs)", 0, -std::numeric_limits<double>::infinity(), kChiTol, true};
    RngStream rng = RngStream::derive(cfg.seed, "appendix/beta_pairs");
    auto draw = [&] { return std::exp(std::log(0.05) + rng.uniform() * (std::log(50.0) - std::log(0.05))); };
    for (long long i = 0; i < cfg.random_pairs; ++i) {
      const BetaParams a(draw(), draw());
      const BetaParams b(draw(), draw());
      const auto [before, after] = mean_contraction_gap(a, b);
      r.worst = std::max(r.worst, after - before);
      ++r.cases;
    }
    r.pass = r.worst <= r.tolerance;
    rows.push_back(r);
  }

  {
    AppendixRow r{"chi >= 0 on x grid, N <= " + std::to_string(cfg.chi_max_n), 0,
                  std::numeric_limits<double>::infinity(), kChiTol, true};
    for (int n = 1; n <= cfg.chi_max_n; ++n)
      for (int k = 1; k <= n; ++k)
        for (int l = 0; l < k; ++l)
          for (int i = 0; i <= 100; ++i) {
            r.worst = std::min(r.worst, chi(i / 100.0, k, l, n));
            ++r.cases;
          }
    r.pass = r.worst >= -r.tolerance;
    rows.push_back(r);
  }

  {
    AppendixRow r{"decomposed sums: S1(0) = N+1-k, S2(1) = l+1", 0, 0.0, 1e-9, true};
    for (int n = 1; n <= cfg.chi_max_n; ++n)
      for (int k = 1; k <= n; ++k)
        for (int l = 0; l < k; ++l) {
          const double e1 = std::abs(chi_first_sum(0.0, k, l, n) - (n + 1 - k));
          const double e2 = std::abs(chi_second_sum(1.0, k, l, n) - (l + 1));
          r.worst = std::max({r.worst, e1, e2});
          ++r.cases;
        }
    r.pass = r.worst <= r.tolerance;
    rows.push_back(r);
  }

  {
    AppendixRow kr{"Kolmogorov contraction, N <= " + std::to_string(cfg.kolmogorov_max_n), 0,
                   -std::numeric_limits<double>::infinity(), kKolmogorovTol, true};
    AppendixRow sr{"k <-> l symmetry of both sides", 0, 0.0, kKolmogorovTol, true};
    for (int n = 0; n <= cfg.kolmogorov_max_n; ++n) {
      const auto side = static_cast<std::size_t>(n + 1);
      std::vector<KolmogorovCheck> table(side * side);
      for (int k = 0; k <= n; ++k)
        for (int l = 0; l <= n; ++l) {
          const auto c = kolmogorov_contraction_check(k, l, n, cfg.scan_points);
          table[static_cast<std::size_t>(k) * side + static_cast<std::size_t>(l)] = c;
          kr.worst = std::max(kr.worst, c.expected - c.prior);
          ++kr.cases;
        }
      for (int k = 0; k <= n; ++k)
        for (int l = 0; l < k; ++l) {
          const auto& c = table[static_cast<std::size_t>(k) * side + static_cast<std::size_t>(l)];
          const auto& m = table[static_cast<std::size_t>(l) * side + static_cast<std::size_t>(k)];
          sr.worst = std::max({sr.worst, std::abs(m.prior - c.prior), std::abs(m.expected - c.expected)});
          ++sr.cases;
        }
    }
    kr.pass = kr.worst <= kr.tolerance;
    sr.pass = sr.worst <= sr.tolerance;
    rows.push_back(kr);
    rows.push_back(sr);
  }
  return rows;
}

}  // namespace qbagents
