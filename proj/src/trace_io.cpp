#include "qbagents/trace_io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qbagents/errors.hpp"

namespace qbagents {

using nlohmann::json;

std::filesystem::path resolve_output_dir(const std::string& configured) {
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return configured.empty() ? std::filesystem::path("output") : std::filesystem::path(configured);
}

OutputPaths output_paths(const std::filesystem::path& base, const std::string& scenario, std::uint64_t seed) {
  OutputPaths p;
  p.dir = base / (scenario + "_seed" + std::to_string(seed));
  p.trace_csv = p.dir / "trace.csv";
  p.summary_json = p.dir / "summary.json";
  p.curves_csv = p.dir / "curves.csv";
  p.series_csv = p.dir / "series.csv";
  p.clouds_csv = p.dir / "clouds.csv";
  p.ellipsoids_csv = p.dir / "ellipsoids.csv";
  return p;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

Eigen::Index width(const Trace& t) {
  Eigen::Index w = 3;
  for (const auto& r : t.records)
    for (const auto& a : r.agents) w = std::max(w, a.mean.size());
  return w;
}

std::string vec_fields(const Eigen::VectorXd& v, Eigen::Index w) {
  std::string s;
  for (Eigen::Index i = 0; i < w; ++i) {
    s += ',';
    if (i < v.size()) s += format_number(v(i));
  }
  return s;
}

std::string vec_header(const char* prefix, Eigen::Index w) {
  std::string s;
  for (Eigen::Index i = 0; i < w; ++i) s += std::string(",") + prefix + "_" + std::to_string(i);
  return s;
}

bool on_cadence(const Trace& t, long long step) {
  const long long k = std::max<long long>(t.summary_interval, 1);
  return step % k == 0 || (!t.records.empty() && step == t.records.back().step);
}

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vec_json(m.row(r).transpose()));
  return a;
}

json num_json(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

std::string trace_csv(const Trace& t) {
  const Eigen::Index w = width(t);
  std::ostringstream os;
  os << "step,agent,action,outcome" << vec_header("mean", w) << vec_header("std", w)
     << ",cov_trace,semi_major,dist_source,dist_frequency,outcome_frequency,mean_gap,resampled\n";
  for (const auto& r : t.records)
    for (const auto& a : r.agents) {
      os << r.step << ',' << a.agent << ',' << a.action << ',';
      if (a.outcome >= 0) os << a.outcome;
      os << vec_fields(a.mean, w) << vec_fields(a.stddev, w) << ',' << format_number(a.cov_trace) << ','
         << format_number(a.axis_lengths.size() ? a.axis_lengths(0) : 0.0) << ',' << format_number(a.dist_source)
         << ',' << format_number(a.dist_frequency) << ',' << format_number(a.outcome_frequency) << ','
         << format_number(r.mean_gap) << ',' << (a.resampled ? 1 : 0) << '\n';
    }
  return os.str();
}

std::string summary_json(const Trace& t) {
  json j;
  j["scenario"] = t.scenario;
  j["seed"] = t.seed;
  j["status"] = t.status;
  j["message"] = t.message;
  j["terminated_step"] = t.terminated_step;
  j["summary_interval"] = t.summary_interval;
  j["steps_recorded"] = t.records.empty() ? 0 : t.records.back().step;
  j["config"] = t.config_json.empty() ? json(nullptr) : json::parse(t.config_json);
  j["final_mean_gap"] = t.records.empty() ? json(nullptr) : num_json(t.records.back().mean_gap);

  json agents = json::array();
  for (std::size_t i = 0; i < t.final_agents.size(); ++i) {
    const Agent& a = t.final_agents[i];
    const PosteriorSummary s = a.ensemble().summary();
    json aj;
    aj["id"] = a.id();
    aj["mean"] = vec_json(s.mean);
    aj["covariance"] = mat_json(s.covariance);
    aj["axis_lengths"] = vec_json(s.axis_lengths);
    aj["axes"] = mat_json(s.axes);
    aj["effective_sample_size"] = a.ensemble().effective_sample_size();
    json counts = json::object();
    for (std::size_t k = 0; k < a.menu().size(); ++k) counts[a.menu()[k].name] = a.outcome_counts()[k];
    aj["outcome_counts"] = counts;
    const auto& pc = a.pauli_counts();
    aj["pauli_counts"] = {{"plus", pc.plus}, {"minus", pc.minus}};
    if (!t.records.empty() && i < t.records.back().agents.size()) {
      const AgentRecord& r = t.records.back().agents[i];
      aj["dist_source"] = num_json(r.dist_source);
      aj["dist_frequency"] = num_json(r.dist_frequency);
      aj["outcome_frequency"] = num_json(r.outcome_frequency);
    }
    agents.push_back(aj);
  }
  j["agents"] = agents;
  return j.dump(2);
}

std::string curves_csv(const Trace& t) {
  std::ostringstream os;
  os << "step,agent,kind,theta,density\n";
  for (const auto& s : t.snapshots) {
    for (std::size_t i = 0; i < s.theta.size(); ++i)
      os << s.step << ',' << s.agent << ",posterior," << format_number(s.theta[i]) << ','
         << format_number(s.density[i]) << '\n';
    for (std::size_t i = 0; i < s.z_theta.size(); ++i)
      os << s.step << ',' << s.agent << ",z_marginal," << format_number(s.z_theta[i]) << ','
         << format_number(s.z_density[i]) << '\n';
  }
  return os.str();
}

std::string series_csv(const Trace& t) {
  const Eigen::Index w = width(t);
  std::ostringstream os;
  os << "step,agent" << vec_header("mean", w) << vec_header("std", w)
     << ",semi_major,dist_source,dist_frequency,outcome_frequency,mean_gap\n";
  for (const auto& r : t.records) {
    if (!on_cadence(t, r.step)) continue;
    for (const auto& a : r.agents)
      os << r.step << ',' << a.agent << vec_fields(a.mean, w) << vec_fields(a.stddev, w) << ','
         << format_number(a.axis_lengths.size() ? a.axis_lengths(0) : 0.0) << ',' << format_number(a.dist_source)
         << ',' << format_number(a.dist_frequency) << ',' << format_number(a.outcome_frequency) << ','
         << format_number(r.mean_gap) << '\n';
  }
  return os.str();
}

std::string clouds_csv(const Trace& t) {
  std::ostringstream os;
  os << "step,agent,x,y,z,inside\n";
  for (const auto& s : t.snapshots)
    for (Eigen::Index c = 0; c < s.cloud.cols(); ++c) {
      os << s.step << ',' << s.agent;
      for (Eigen::Index k = 0; k < 3; ++k) {
        os << ',';
        if (k < s.cloud.rows()) os << format_number(s.cloud(k, c));
      }
      os << ',' << (s.inside[static_cast<std::size_t>(c)] ? 1 : 0) << '\n';
    }
  return os.str();
}

std::string ellipsoids_csv(const Trace& t) {
  const Eigen::Index w = width(t);
  std::ostringstream os;
  os << "step,agent" << vec_header("mean", w) << ",axis,length" << vec_header("dir", w) << '\n';
  for (const auto& r : t.records) {
    if (!on_cadence(t, r.step)) continue;
    for (const auto& a : r.agents)
      for (Eigen::Index k = 0; k < a.axis_lengths.size(); ++k)
        os << r.step << ',' << a.agent << vec_fields(a.mean, w) << ',' << k << ',' << format_number(a.axis_lengths(k))
           << vec_fields(a.axes.col(k), w) << '\n';
  }
  return os.str();
}

void emit_trace(const Trace& trace, const OutputPaths& paths) {
  std::error_code ec;
  std::filesystem::create_directories(paths.dir, ec);
  if (ec) throw Error("cannot create " + paths.dir.string() + ": " + ec.message());
  write_file(paths.trace_csv, trace_csv(trace));
  write_file(paths.summary_json, summary_json(trace));
}

void emit_plot_data(const Trace& trace, const OutputPaths& paths) {
  std::error_code ec;
  std::filesystem::create_directories(paths.dir, ec);
  if (ec) throw Error("cannot create " + paths.dir.string() + ": " + ec.message());
  write_file(paths.curves_csv, curves_csv(trace));
  write_file(paths.series_csv, series_csv(trace));
  write_file(paths.clouds_csv, clouds_csv(trace));
  write_file(paths.ellipsoids_csv, ellipsoids_csv(trace));
}

}  // namespace qbagents
