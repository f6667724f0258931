#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qbagents/core_math.hpp"

namespace qbagents {

/// Tolerance for the numerical "is nonnegative" assertions.
inline constexpr double kChiTol = 1e-12;
inline constexpr double kKolmogorovTol = 1e-10;

/// w1 Beta(c1) + w2 Beta(c2).
struct BetaMixture {
  double w1 = 1.0;
  BetaParams c1;
  double w2 = 0.0;
  BetaParams c2;

  double mean() const;
  double cdf(double x) const;
};

/// Alice's posterior density averaged over the outcome she expects from Bob:
/// (mB/mA theta + (1-mB)/(1-mA)(1-theta)) P_A(theta). For a Beta prior this is
/// mB Beta(alpha+1, beta) + (1-mB) Beta(alpha, beta+1).
BetaMixture expected_posterior(const BetaParams& prior_a, double mean_b);
Density1D expected_posterior(const Density1D& prior_a, double mean_b);

/// (|<theta>_B - <theta>_A|, |<theta>_B - <ExpPos_A>|).
std::pair<double, double> mean_contraction_gap(const BetaParams& prior_a, const BetaParams& prior_b);
std::pair<double, double> mean_contraction_gap(const Density1D& prior_a, const Density1D& prior_b);

/// The chi polynomial whose nonnegativity on [0, 1] for 0 <= l < k <= N
/// gives Kolmogorov contraction between uniform-start Beta agents.
double chi(double x, int k, int l, int n);
/// chi = (1-x) A S1(x) + x B S2(x). These return S1 and S2.
double chi_first_sum(double x, int k, int l, int n);
double chi_second_sum(double x, int k, int l, int n);
/// A and B, the nonnegative prefactors of the two sums.
double chi_first_prefactor(double x, int l, int n);
double chi_second_prefactor(double x, int k, int n);

struct KolmogorovCheck {
  double prior = 0.0;
  double expected = 0.0;
};

/// Priors Beta(k+1, N-k+1) and Beta(l+1, N-l+1): Kolmogorov distance between
/// the priors and between the two expected posteriors.
KolmogorovCheck kolmogorov_contraction_check(int k, int l, int n, std::size_t scan_points = 2001);

struct AppendixRow {
  std::string name;
  long long cases = 0;
  /// The tightest value seen (e.g. min chi, max excess).
  double worst = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct AppendixConfig {
  int chi_max_n = 25;
  int kolmogorov_max_n = 15;
  long long random_pairs = 10000;
  std::uint64_t seed = 2023;
  std::size_t scan_points = 2001;
};

std::vector<AppendixRow> verify_appendix(const AppendixConfig& cfg = {});

}  // namespace qbagents
