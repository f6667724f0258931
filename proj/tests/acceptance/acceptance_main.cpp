// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qbagents/agreement.hpp"
#include "qbagents/errors.hpp"
#include "qbagents/postulate.hpp"
#include "qbagents/scenario.hpp"
#include "support.hpp"

using namespace qbagents;

namespace {

// Pinned tolerances and sizes.
constexpr double kBornTol = 1e-10;
constexpr double kGoldenTol = 1e-12;
constexpr double kBornSeconds = 5.0;

constexpr int kCoinSeeds = 20;
constexpr int kCoinSteps = 1000;
constexpr double kCoinFinalTol = 0.05;
constexpr int kCoinMinGood = 18;
constexpr double kCoinSeconds = 30.0;

constexpr int kQubitSeeds = 20;
constexpr double kQubitMedianTol = 0.1;
constexpr int kQubitMinShrink = 18;
constexpr double kQubitSeconds = 300.0;

constexpr int kPairSeeds = 200;
constexpr int kPairSteps = 1000;
constexpr int kDisjointSeeds = 200;

constexpr double kAppendixSeconds = 120.0;

constexpr int kPolarSeeds = 1000;
constexpr double kPolarRate = 0.5;
constexpr double kPolarTol = 0.05;

constexpr int kBiasSeeds = 50;
constexpr int kBiasMinGood = 40;
constexpr long long kBiasFirstStep = 20;
constexpr double kBiasSigmas = 3.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("criterion %d (%s): %s  %s\n", id, name, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

const AgentRecord& record_of(const InteractionRecord& r, const std::string& id) {
  for (const auto& a : r.agents)
    if (a.agent == id) return a;
  throw Error("no record for agent " + id);
}

const InteractionRecord& at_step(const Trace& t, long long step) {
  for (const auto& r : t.records)
    if (r.step == step) return r;
  throw Error("no record for step " + std::to_string(step));
}

// Born rule through Phi against tr(rho D_j).
void born_equivalence() {
  const auto t0 = Clock::now();
  const ReferenceAction sic = sic_d2();
  const PhysicalPostulate q = PhysicalPostulate::quantum(sic);
  testsupport::Gen gen(20240101);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const DensityOp rho(gen.density());
    const auto d = gen.povm(gen.integer(2, 6));
    std::vector<HermitianOp> eff;
    for (const auto& e : d) eff.emplace_back(e);
    const ProbVector got = q.apply(born_probabilities(rho, sic.effects()), conditional_matrix(Povm(eff), sic));
    for (std::size_t j = 0; j < d.size(); ++j)
      worst = std::max(worst, std::abs(got[j] - (rho.matrix() * d[j]).trace().real()));
  }
  const double secs = seconds_since(t0);
  report(1, "Born-rule equivalence", worst <= kBornTol && secs < kBornSeconds,
         fmt("max error %.3g (tol %.0e), %.2f s", worst, kBornTol, secs));
}

void sic_golden() {
  const ReferenceAction sic = sic_d2();
  const double r3 = std::sqrt(3.0);
  double worst = 0.0;
  auto track = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };

  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      track((sic.effects()[i].matrix() * sic.effects()[j].matrix()).trace().real(), (2.0 * (i == j) + 1.0) / 12.0);

  const Eigen::MatrixXd phi = phi_matrix(sic);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) track(phi(i, j), 3.0 * (i == j) - 0.5);

  CMatrix plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  const ProbVector pp = born_probabilities(DensityOp(plus), sic.effects());
  const double want_plus[4] = {(3 + r3) / 12, (3 - r3) / 12, (3 + r3) / 12, (3 - r3) / 12};
  for (std::size_t i = 0; i < 4; ++i) track(pp[i], want_plus[i]);

  // Rows of R_X, R_Y, R_Z as signs of sqrt(3) in (3 +- sqrt(3)) / 6.
  const int sign[3][4] = {{1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};
  const Eigen::MatrixXd root = sqrt_phi(phi);
  for (int a = 0; a < 3; ++a) {
    const Eigen::MatrixXd r = conditional_matrix(pauli_povm(static_cast<PauliAxis>(a)), sic).matrix();
    for (int i = 0; i < 4; ++i) {
      track(r(0, i), (3 + sign[a][i] * r3) / 6);
      track(r(1, i), (3 - sign[a][i] * r3) / 6);
    }
    const Eigen::MatrixXd sharp = r * root;
    for (int i = 0; i < 4; ++i) {
      track(sharp(0, i), sign[a][i] > 0 ? 1.0 : 0.0);
      track(sharp(1, i), sign[a][i] > 0 ? 0.0 : 1.0);
    }
  }
  report(2, "SIC golden values", worst <= kGoldenTol, fmt("max error %.3g (tol %.0e)", worst, kGoldenTol));
}

void coin_tomography() {
  const auto t0 = Clock::now();
  ScenarioConfig base = default_config("coin_tomography");
  base.n_steps = kCoinSteps;
  base.snapshot_steps = {};
  base.agents[0].prior.representation = "particles";
  const double n_particles = static_cast<double>(base.agents[0].prior.n_particles);
  const double tol = 3.0 / std::sqrt(n_particles);
  double worst = 0.0;
  int good = 0;
  bool completed = true;
  for (int s = 0; s < kCoinSeeds; ++s) {
    ScenarioConfig c = base;
    c.seed = base.seed + static_cast<std::uint64_t>(s);
    const Trace t = run_scenario(c);
    completed = completed && t.status == "completed";
    long long heads = 0, n = 0;
    for (const auto& r : t.records) {
      const AgentRecord& a = r.agents[0];
      if (a.outcome >= 0) {
        heads += a.outcome == 0;
        ++n;
      }
      worst = std::max(worst, std::abs(a.mean(0) - (heads + 1.0) / (n + 2.0)));
    }
    good += std::abs(t.records.back().agents[0].mean(0) - 0.75) < kCoinFinalTol;
  }
  const double secs = seconds_since(t0);
  report(3, "coin tomography", completed && worst < tol && good >= kCoinMinGood && secs < kCoinSeconds,
         fmt("max |mean - (h+1)/(N+2)| %.4g (tol %.4g), %d/%d seeds within %.2f of 3/4, %.1f s", worst, tol, good,
             kCoinSeeds, kCoinFinalTol, secs));
}

void qubit_tomography() {
  const auto t0 = Clock::now();
  const ScenarioConfig base = [] {
    ScenarioConfig c = default_config("qubit_tomography");
    c.snapshot_steps = {};
    return c;
  }();
  const long long last = base.n_steps;
  const Eigen::Vector3d plus(1, 0, 0);
  std::vector<double> d50, d500;
  int shrink = 0;
  bool completed = true;
  for (int s = 0; s < kQubitSeeds; ++s) {
    ScenarioConfig c = base;
    c.seed = base.seed + static_cast<std::uint64_t>(s);
    const Trace t = run_scenario(c);
    completed = completed && t.status == "completed";
    const AgentRecord& a = at_step(t, 50).agents[0];
    const AgentRecord& b = at_step(t, last).agents[0];
    // Trace distance between qubit states is half the Bloch distance.
    d50.push_back(0.5 * (a.mean - plus).norm());
    d500.push_back(0.5 * (b.mean - plus).norm());
    shrink += b.axis_lengths(0) < a.axis_lengths(0);
  }
  const double m50 = median(d50), m500 = median(d500), secs = seconds_since(t0);
  report(4, "qubit tomography",
         completed && m500 < kQubitMedianTol && m500 < m50 && shrink >= kQubitMinShrink && secs < kQubitSeconds,
         fmt("median trace distance step 50 %.4f, step %lld %.4f (tol %.2f), semi-major shrank in %d/%d, %.1f s",
             m50, last, m500, kQubitMedianTol, shrink, kQubitSeeds, secs));
}

void classical_agreement() {
  const auto t0 = Clock::now();
  ScenarioConfig base = default_config("classical_pair");
  base.n_steps = kPairSteps;
  base.snapshot_steps = {};
  std::vector<double> g10, gfinal;
  bool completed = true;
  for (int s = 0; s < kPairSeeds; ++s) {
    ScenarioConfig c = base;
    c.seed = base.seed + static_cast<std::uint64_t>(s);
    const Trace t = run_scenario(c);
    completed = completed && t.status == "completed";
    g10.push_back(at_step(t, 10).mean_gap);
    gfinal.push_back(t.records.back().mean_gap);
  }
  const double m10 = median(g10), mf = median(gfinal);

  // Disjoint supports: every record's mean stays inside its agent's initial
  // interval, and no final weight sits outside it.
  ScenarioConfig dis = default_config("classical_disjoint");
  dis.snapshot_steps = {};
  long long leaks = 0;
  for (int s = 0; s < kDisjointSeeds; ++s) {
    ScenarioConfig c = dis;
    c.seed = dis.seed + static_cast<std::uint64_t>(s);
    const Trace t = run_scenario(c);
    completed = completed && t.status == "completed";
    for (std::size_t i = 0; i < c.agents.size(); ++i) {
      const double lo = c.agents[i].prior.lo, hi = c.agents[i].prior.hi;
      for (const auto& r : t.records) {
        const double m = record_of(r, c.agents[i].id).mean(0);
        leaks += m < lo || m > hi;
      }
      const ParticleEnsemble& e = t.final_agents[i].ensemble();
      for (Eigen::Index k = 0; k < e.size(); ++k) {
        const double x = e.points()(0, k);
        leaks += (x < lo || x > hi) && e.weights()(k) != 0.0;
      }
    }
  }
  const double secs = seconds_since(t0);
  report(5, "classical agreement", completed && mf < m10 && leaks == 0,
         fmt("median gap step 10 %.4f, step %d %.4f; disjoint-support leaks %lld over %d seeds, %.1f s", m10,
             kPairSteps, mf, leaks, kDisjointSeeds, secs));
}

void appendix() {
  const auto t0 = Clock::now();
  const auto rows = verify_appendix();
  const double secs = seconds_since(t0);
  bool pass = secs < kAppendixSeconds;
  std::string detail;
  for (const auto& r : rows) {
    pass = pass && r.pass;
    detail += fmt("[%s: %lld cases, worst %.3g, %s] ", r.name.c_str(), r.cases, r.worst, r.pass ? "ok" : "fail");
  }
  report(6, "appendix checks", pass, detail + fmt("%.1f s", secs));
}

// A single-agent source run against the same agent paired with a delta-prior
// partner who only ever takes the trivial action.
void exogenous_limit() {
  auto pair_of = [](const ScenarioConfig& single) {
    ScenarioConfig c = single;
    c.scenario = "custom";
    AgentSpec src;
    src.id = "source";
    src.stream_key = "source";
    src.postulate = single.agents[0].postulate;
    src.n_outcomes = single.agents[0].n_outcomes;
    src.chart = single.agents[0].chart;
    src.prior.kind = "atoms";
    src.prior.representation = "atoms";
    src.prior.points = {single.source->point};
    src.prior.weights = {1.0};
    ActionSpec trivial;
    trivial.name = "none";
    trivial.kind = "trivial";
    src.menu = {trivial};
    c.agents.push_back(src);
    c.source.reset();
    return c;
  };
  long long compared = 0, mismatches = 0;
  for (const char* id : {"coin_tomography", "qubit_tomography"}) {
    ScenarioConfig single = default_config(id);
    single.snapshot_steps = {};
    for (std::uint64_t s = 0; s < 3; ++s) {
      single.seed = 42 + s;
      const Trace a = run_scenario(single);
      const Trace b = run_scenario(pair_of(single));
      if (a.records.size() != b.records.size()) {
        ++mismatches;
        continue;
      }
      for (std::size_t k = 0; k < a.records.size(); ++k) {
        const AgentRecord& x = a.records[k].agents[0];
        const AgentRecord& y = record_of(b.records[k], x.agent);
        const bool same = x.action == y.action && x.outcome == y.outcome && x.mean == y.mean &&
                          x.stddev == y.stddev && x.cov_trace == y.cov_trace && x.axis_lengths == y.axis_lengths &&
                          x.resampled == y.resampled &&
                          (x.outcome_frequency == y.outcome_frequency ||
                           (std::isnan(x.outcome_frequency) && std::isnan(y.outcome_frequency)));
        mismatches += !same;
        ++compared;
      }
    }
  }
  report(7, "exogenous limit", mismatches == 0 && compared > 0,
         fmt("%lld agent rows compared bit-for-bit, %lld mismatches", compared, mismatches));
}

ScenarioConfig two_sided_coin(const char* exchange, long long steps) {
  ScenarioConfig c;
  c.scenario = "custom";
  c.n_steps = steps;
  c.interaction = "prior_sampling";
  c.exchange = exchange;
  for (const char* id : {"alice", "bob"}) {
    AgentSpec a;
    a.id = id;
    a.stream_key = id;
    a.prior.kind = "atoms";
    a.prior.representation = "atoms";
    a.prior.points = {{0.0}, {1.0}};
    a.prior.weights = {0.5, 0.5};
    ActionSpec flip;
    flip.name = "flip";
    flip.kind = "identity";
    flip.labels = {"heads", "tails"};
    a.menu = {flip};
    c.agents.push_back(a);
  }
  return c;
}

void polarization() {
  int impossible = 0, other = 0;
  ScenarioConfig sim = two_sided_coin("simultaneous", 2);
  for (int s = 0; s < kPolarSeeds; ++s) {
    sim.seed = static_cast<std::uint64_t>(s);
    const Trace t = run_scenario(sim);
    if (t.status == "terminated")
      ++impossible;
    else if (t.status != "completed")
      ++other;
  }
  const double rate = static_cast<double>(impossible) / kPolarSeeds;

  int agreed = 0;
  ScenarioConfig turn = two_sided_coin("turn_based", 1);
  for (int s = 0; s < kPolarSeeds; ++s) {
    turn.seed = static_cast<std::uint64_t>(s);
    const Trace t = run_scenario(turn);
    if (t.status != "completed") continue;
    const ParticleEnsemble& a = t.final_agents[0].ensemble();
    const ParticleEnsemble& b = t.final_agents[1].ensemble();
    const bool one_point = a.summary().covariance(0, 0) == 0.0 && b.summary().covariance(0, 0) == 0.0;
    agreed += one_point && a.mean()(0) == b.mean()(0);
  }
  report(8, "prior-sampling polarization",
         std::abs(rate - kPolarRate) <= kPolarTol && other == 0 && agreed == kPolarSeeds,
         fmt("simultaneous impossible-outcome rate %.3f (%.2f +- %.2f) over %d seeds; turn-based identical one-point "
             "posteriors in %d/%d",
             rate, kPolarRate, kPolarTol, kPolarSeeds, agreed, kPolarSeeds));
}

// Smallest k with P(Bin(n, p) <= k) >= q.
long long binomial_quantile(long long n, double p, double q) {
  double cdf = 0.0;
  for (long long k = 0; k <= n; ++k) {
    cdf += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
                    (n - k) * std::log1p(-p));
    if (cdf >= q) return k;
  }
  return n;
}

void biased_utility() {
  ScenarioConfig base = default_config("quantum_pair_biasedZ");
  base.snapshot_steps = {};
  const long long window = base.n_steps - kBiasFirstStep + 1;
  const long long cut = binomial_quantile(window, 1.0 / 3, 0.05);
  int good = 0;
  std::map<std::string, long long> alice;
  long long alice_total = 0;
  bool completed = true;
  for (int s = 0; s < kBiasSeeds; ++s) {
    ScenarioConfig c = base;
    c.seed = base.seed + static_cast<std::uint64_t>(s);
    const Trace t = run_scenario(c);
    completed = completed && t.status == "completed";
    long long bob_z = 0;
    for (const auto& r : t.records) {
      if (r.step < 1) continue;
      const AgentRecord& a = record_of(r, "alice");
      alice[a.action]++;
      ++alice_total;
      if (r.step >= kBiasFirstStep) bob_z += record_of(r, "bob").action == "Z";
    }
    good += bob_z < cut;
  }
  const double mean = alice_total / 3.0, sd = std::sqrt(alice_total * (1.0 / 3) * (2.0 / 3));
  bool uniform = alice.size() == 3;
  for (const auto& [name, n] : alice) uniform = uniform && std::abs(n - mean) <= kBiasSigmas * sd;
  report(9, "biased-utility behavior", completed && good >= kBiasMinGood && uniform,
         fmt("Bob Z count over steps %lld-%lld below %lld (Bin(%lld,1/3) 5th percentile) in %d/%d seeds; Alice X/Y/Z "
             "%lld/%lld/%lld of %lld (expected %.1f +- %.1f)",
             kBiasFirstStep, base.n_steps, cut, window, good, kBiasSeeds, alice["X"], alice["Y"], alice["Z"],
             alice_total, mean, kBiasSigmas * sd));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> checks = {born_equivalence, sic_golden,   coin_tomography,
                                                     qubit_tomography, classical_agreement, appendix,
                                                     exogenous_limit,  polarization, biased_utility};
  for (std::size_t i = 0; i < checks.size(); ++i) {
    try {
      checks[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), "error", false, e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, checks.size());
  return failures;
}
