#include "qbagents/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qbagents/errors.hpp"

namespace qbagents {

std::string to_string(Regularization r) {
  switch (r) {
    case Regularization::None:
      return "none";
    case Regularization::ZProjection:
      return "z_projection";
    case Regularization::ZEmbedding:
      return "z_embedding";
    case Regularization::SupportRestriction:
      return "support_restriction";
  }
  return "none";
}

std::string to_string(InteractionMode m) { return m == InteractionMode::Expectation ? "expectation" : "prior_sampling"; }

std::string to_string(ExchangeMode m) { return m == ExchangeMode::Simultaneous ? "simultaneous" : "turn_based"; }

AgentStreams AgentStreams::derive(std::uint64_t seed, const std::string& key) {
  return {RngStream::derive(seed, key + "/choice"), RngStream::derive(seed, key + "/outcome"),
          RngStream::derive(seed, key + "/resample"), RngStream::derive(seed, key + "/broadcast"),
          RngStream::derive(seed, key + "/plot")};
}

Eigen::VectorXd broadcast(const Agent& agent) { return agent.ensemble().mean(); }

Eigen::VectorXd broadcast_sample(const Agent& agent, RngStream& rng) {
  const auto& ens = agent.ensemble();
  return ens.points().col(ens.draw_index(rng));
}

ProbVector regularize(const ParameterChart& from, const Eigen::VectorXd& point, const ParameterChart& to,
                      Regularization reg) {
  switch (reg) {
    case Regularization::None:
    case Regularization::SupportRestriction:
      if (from.reference_size() != to.reference_size())
        throw DimensionMismatch("broadcast and receiver reference sizes differ; a regularization is required");
      return from.probabilities(point);
    case Regularization::ZProjection: {
      if (from.kind() != ChartKind::Bloch) throw DomainError("z projection needs a Bloch broadcast");
      if (to.reference_size() != 2) throw DimensionMismatch("z projection needs a two-outcome receiver");
      const double z = point(2);
      return ProbVector{0.5 * (1.0 + z), 0.5 * (1.0 - z)};
    }
    case Regularization::ZEmbedding: {
      if (from.kind() != ChartKind::Interval) throw DomainError("z embedding needs an interval broadcast");
      if (to.kind() != ChartKind::Bloch) throw DomainError("z embedding needs a Bloch receiver");
      return to.probabilities(Eigen::Vector3d(0.0, 0.0, 2.0 * point(0) - 1.0));
    }
  }
  throw DomainError("unknown regularization");
}

Eigen::Index sample_outcome(const PhysicalPostulate& post, const ProbVector& p, const CondProbMatrix& r,
                            RngStream& rng) {
  const ProbVector q = post.apply(p, r);
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    acc += q[j];
    if (u < acc) return static_cast<Eigen::Index>(j);
  }
  auto last = static_cast<Eigen::Index>(q.size()) - 1;
  while (last > 0 && q[static_cast<std::size_t>(last)] == 0.0) --last;
  return last;
}

// ---------------------------------------------------------------------------

namespace {

// Bloch z of an agent's mean, reading an interval mean theta as 2 theta - 1.
double mean_z(const Agent& a) {
  const Eigen::VectorXd m = a.ensemble().mean();
  return a.ensemble().chart().kind() == ChartKind::Interval ? 2.0 * m(0) - 1.0 : m(2);
}

}  // namespace

double mean_gap(const Agent& a, const Agent& b) {
  const auto ka = a.ensemble().chart().kind();
  const auto kb = b.ensemble().chart().kind();
  const Eigen::VectorXd ma = a.ensemble().mean();
  const Eigen::VectorXd mb = b.ensemble().mean();
  if (ka == ChartKind::Interval && kb == ChartKind::Interval) return std::abs(ma(0) - mb(0));
  if (ka == ChartKind::Bloch && kb == ChartKind::Bloch)
    return trace_distance(bloch_operator(ma), bloch_operator(mb));
  if ((ka == ChartKind::Interval && kb == ChartKind::Bloch) || (ka == ChartKind::Bloch && kb == ChartKind::Interval))
    return 0.5 * std::abs(mean_z(a) - mean_z(b));
  const Eigen::VectorXd pa = a.ensemble().chart().raw_probabilities(ma);
  const Eigen::VectorXd pb = b.ensemble().chart().raw_probabilities(mb);
  if (pa.size() != pb.size()) return std::numeric_limits<double>::quiet_NaN();
  return 0.5 * (pa - pb).cwiseAbs().sum();
}

AgentRecord summarize(const Agent& agent, const ExogenousSource* source) {
  const auto& ens = agent.ensemble();
  const PosteriorSummary s = ens.summary();
  AgentRecord r;
  r.agent = agent.id();
  r.mean = s.mean;
  r.stddev = s.stddev();
  r.cov_trace = s.covariance.trace();
  r.axis_lengths = s.axis_lengths;
  r.axes = s.axes;

  const auto kind = ens.chart().kind();
  if (source) {
    const auto sk = source->chart.kind();
    if (kind == ChartKind::Interval && sk == ChartKind::Interval)
      r.dist_source = std::abs(s.mean(0) - source->point(0));
    else if (kind == ChartKind::Bloch && sk == ChartKind::Bloch)
      r.dist_source = trace_distance(bloch_operator(s.mean), bloch_operator(source->point));
  }

  if (kind == ChartKind::Interval) {
    long long first = 0;
    long long total = 0;
    for (const auto& c : agent.outcome_counts()) {
      if (c.size() != 2) continue;
      first += c[0];
      total += c[0] + c[1];
    }
    if (total > 0) {
      r.outcome_frequency = static_cast<double>(first) / static_cast<double>(total);
      r.dist_frequency = std::abs(s.mean(0) - r.outcome_frequency);
    }
  } else if (kind == ChartKind::Bloch) {
    const auto& pc = agent.pauli_counts();
    long long total = 0;
    for (std::size_t k = 0; k < 3; ++k) total += pc.plus[k] + pc.minus[k];
    if (total > 0) r.dist_frequency = trace_distance(bloch_operator(s.mean), frequency_operator(pc).op);
  }
  return r;
}

namespace {

void receive(Agent& agent, std::size_t action, const ProbVector& p, AgentStreams& streams, StepResult& out) {
  const Eigen::Index j = sample_outcome(agent.postulate(), p, agent.action(action).matrix, streams.outcome);
  agent.observe(action, j);
  out.actions.push_back(action);
  out.outcomes.push_back(j);
  out.resampled.push_back(agent.rejuvenate(streams.resample));
}

}  // namespace

StepResult step_exogenous(Agent& agent, const ExogenousSource& source, Regularization reg, AgentStreams& streams) {
  StepResult out;
  const std::size_t a = agent.choose_action(streams.choice);
  const ProbVector p = regularize(source.chart, source.point, agent.ensemble().chart(), reg);
  receive(agent, a, p, streams, out);
  return out;
}

StepResult step_expectation_sampling(Agent& a, Agent& b, Regularization reg_a, Regularization reg_b,
                                     AgentStreams& sa, AgentStreams& sb) {
  const Eigen::VectorXd from_a = broadcast(a);
  const Eigen::VectorXd from_b = broadcast(b);
  const std::size_t act_a = a.choose_action(sa.choice);
  const std::size_t act_b = b.choose_action(sb.choice);
  const ProbVector pa = regularize(b.ensemble().chart(), from_b, a.ensemble().chart(), reg_a);
  const ProbVector pb = regularize(a.ensemble().chart(), from_a, b.ensemble().chart(), reg_b);
  StepResult out;
  receive(a, act_a, pa, sa, out);
  receive(b, act_b, pb, sb, out);
  return out;
}

StepResult step_prior_sampling(Agent& a, Agent& b, Regularization reg_a, Regularization reg_b, AgentStreams& sa,
                               AgentStreams& sb, ExchangeMode mode) {
  StepResult out;
  if (mode == ExchangeMode::Simultaneous) {
    const Eigen::VectorXd from_a = broadcast_sample(a, sa.broadcast);
    const Eigen::VectorXd from_b = broadcast_sample(b, sb.broadcast);
    const std::size_t act_a = a.choose_action(sa.choice);
    const std::size_t act_b = b.choose_action(sb.choice);
    const ProbVector pa = regularize(b.ensemble().chart(), from_b, a.ensemble().chart(), reg_a);
    const ProbVector pb = regularize(a.ensemble().chart(), from_a, b.ensemble().chart(), reg_b);
    receive(a, act_a, pa, sa, out);
    receive(b, act_b, pb, sb, out);
    return out;
  }

  StepResult tmp;
  const Eigen::VectorXd from_a = broadcast_sample(a, sa.broadcast);
  const std::size_t act_b = b.choose_action(sb.choice);
  receive(b, act_b, regularize(a.ensemble().chart(), from_a, b.ensemble().chart(), reg_b), sb, tmp);
  const Eigen::VectorXd from_b = broadcast_sample(b, sb.broadcast);
  const std::size_t act_a = a.choose_action(sa.choice);
  receive(a, act_a, regularize(b.ensemble().chart(), from_b, a.ensemble().chart(), reg_a), sa, out);
  out.actions.push_back(tmp.actions[0]);
  out.outcomes.push_back(tmp.outcomes[0]);
  out.resampled.push_back(tmp.resampled[0]);
  return out;
}

// ---------------------------------------------------------------------------

Snapshot take_snapshot(const Agent& agent, long long step, RngStream& rng, std::size_t cloud_points) {
  Snapshot snap;
  snap.step = step;
  snap.agent = agent.id();
  const auto& ens = agent.ensemble();

  if (ens.chart().kind() == ChartKind::Interval) {
    if (ens.representation() == Representation::Grid) {
      const Density1D d = ens.density();
      snap.theta = d.grid();
      snap.density = d.pdf_values();
    } else {
      constexpr int bins = 100;
      snap.theta.resize(bins);
      snap.density.assign(bins, 0.0);
      for (int k = 0; k < bins; ++k) snap.theta[static_cast<std::size_t>(k)] = (k + 0.5) / bins;
      for (Eigen::Index i = 0; i < ens.size(); ++i) {
        const int k = std::clamp(static_cast<int>(ens.points()(0, i) * bins), 0, bins - 1);
        snap.density[static_cast<std::size_t>(k)] += ens.weights()(i) * bins;
      }
    }
    return snap;
  }

  const PosteriorSummary s = ens.summary();
  const auto m = static_cast<Eigen::Index>(std::min<std::size_t>(cloud_points, static_cast<std::size_t>(ens.size())));
  snap.cloud.resize(ens.dim(), m);
  snap.inside.resize(static_cast<std::size_t>(m));
  for (Eigen::Index c = 0; c < m; ++c) {
    const Eigen::VectorXd x = ens.points().col(ens.draw_index(rng));
    snap.cloud.col(c) = x;
    const Eigen::VectorXd proj = s.axes.transpose() * (x - s.mean);
    double q = 0.0;
    bool inside = true;
    for (Eigen::Index k = 0; k < proj.size(); ++k) {
      if (s.axis_lengths(k) > 0.0)
        q += (proj(k) / s.axis_lengths(k)) * (proj(k) / s.axis_lengths(k));
      else if (std::abs(proj(k)) > 1e-12)
        inside = false;
    }
    snap.inside[static_cast<std::size_t>(c)] = inside && q <= 1.0;
  }

  if (ens.chart().kind() == ChartKind::Bloch) {
    constexpr int bins = 50;
    snap.z_theta.resize(bins);
    snap.z_density.assign(bins, 0.0);
    for (int k = 0; k < bins; ++k) snap.z_theta[static_cast<std::size_t>(k)] = (k + 0.5) / bins;
    for (Eigen::Index i = 0; i < ens.size(); ++i) {
      const double theta = 0.5 * (1.0 + ens.points()(2, i));
      const int k = std::clamp(static_cast<int>(theta * bins), 0, bins - 1);
      snap.z_density[static_cast<std::size_t>(k)] += ens.weights()(i) * bins;
    }
  }
  return snap;
}

namespace {

InteractionRecord make_record(long long step, const std::vector<Agent>& agents, const ExogenousSource* source,
                              const StepResult* result) {
  InteractionRecord rec;
  rec.step = step;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    AgentRecord r = summarize(agents[i], source);
    if (result) {
      r.action = agents[i].action(result->actions[i]).name;
      r.outcome = static_cast<long long>(result->outcomes[i]);
      r.resampled = result->resampled[i];
    }
    rec.agents.push_back(std::move(r));
  }
  if (agents.size() == 2) rec.mean_gap = mean_gap(agents[0], agents[1]);
  return rec;
}

}  // namespace

Trace run(Simulation sim) {
  if (sim.n_steps < 0) throw DomainError("n_steps must be nonnegative");
  if (sim.source ? sim.agents.size() != 1 : sim.agents.size() != 2)
    throw DomainError("a run needs one agent with a source or two interacting agents");
  sim.regularization.resize(sim.agents.size(), Regularization::None);

  Trace trace;
  trace.scenario = sim.scenario;
  trace.seed = sim.seed;
  trace.summary_interval = sim.summary_interval;
  trace.source = sim.source;

  std::vector<AgentStreams> streams;
  for (const auto& a : sim.agents) streams.push_back(AgentStreams::derive(sim.seed, a.stream_key()));
  const std::set<long long> snaps(sim.snapshot_steps.begin(), sim.snapshot_steps.end());
  const ExogenousSource* src = sim.source ? &*sim.source : nullptr;

  auto snapshot = [&](long long step) {
    if (!snaps.count(step)) return;
    for (std::size_t i = 0; i < sim.agents.size(); ++i)
      trace.snapshots.push_back(take_snapshot(sim.agents[i], step, streams[i].plot, sim.cloud_points));
  };

  trace.records.push_back(make_record(0, sim.agents, src, nullptr));
  snapshot(0);
  for (long long step = 1; step <= sim.n_steps; ++step) {
    StepResult res;
    try {
      if (src) {
        res = step_exogenous(sim.agents[0], *src, sim.regularization[0], streams[0]);
      } else if (sim.mode == InteractionMode::Expectation) {
        res = step_expectation_sampling(sim.agents[0], sim.agents[1], sim.regularization[0], sim.regularization[1],
                                        streams[0], streams[1]);
      } else {
        res = step_prior_sampling(sim.agents[0], sim.agents[1], sim.regularization[0], sim.regularization[1],
                                  streams[0], streams[1], sim.exchange);
      }
    } catch (const ImpossibleOutcome& e) {
      trace.status = "terminated";
      trace.message = e.what();
      trace.terminated_step = step;
      break;
    }
    trace.records.push_back(make_record(step, sim.agents, src, &res));
    snapshot(step);
  }
  trace.final_agents = std::move(sim.agents);
  return trace;
}

}  // namespace qbagents
