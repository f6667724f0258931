#include "qbagents/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "qbagents/errors.hpp"

namespace qbagents {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Registry

namespace {

ActionSpec flip_action() {
  ActionSpec a;
  a.name = "flip";
  a.kind = "identity";
  a.labels = {"heads", "tails"};
  return a;
}

std::vector<ActionSpec> pauli_menu(const std::string& kind = "pauli") {
  std::vector<ActionSpec> menu;
  for (const char* axis : {"X", "Y", "Z"}) {
    ActionSpec a;
    a.name = kind == "pauli" ? axis : std::string("sharp_") + axis;
    a.kind = kind;
    a.axis = axis;
    menu.push_back(a);
  }
  return menu;
}

AgentSpec coin_agent(const std::string& id, PriorSpec prior) {
  AgentSpec a;
  a.id = id;
  a.stream_key = id;
  a.postulate = "classical";
  a.n_outcomes = 2;
  a.chart = "interval";
  a.prior = std::move(prior);
  a.menu = {flip_action()};
  return a;
}

PriorSpec ball_prior() {
  PriorSpec p;
  p.kind = "uniform";
  p.representation = "particles";
  p.n_particles = 10000;
  return p;
}

AgentSpec qubit_agent(const std::string& id) {
  AgentSpec a;
  a.id = id;
  a.stream_key = id;
  a.postulate = "quantum_sic";
  a.n_outcomes = 4;
  a.chart = "bloch";
  a.prior = ball_prior();
  a.menu = pauli_menu();
  return a;
}

AgentSpec clara_agent(const std::string& menu_kind) {
  AgentSpec a;
  a.id = "clara";
  a.stream_key = "clara";
  a.postulate = "classical";
  a.n_outcomes = 4;
  a.chart = "bloch";
  a.prior = ball_prior();
  a.menu = pauli_menu(menu_kind);
  a.regularization = "support_restriction";
  return a;
}

ScenarioConfig base(const std::string& id, long long steps) {
  ScenarioConfig c;
  c.scenario = id;
  c.seed = 42;
  c.n_steps = steps;
  c.summary_interval = 10;
  c.snapshot_steps = {0, steps};
  return c;
}

PriorSpec uniform_grid(double lo = 0.0, double hi = 1.0) {
  PriorSpec p;
  p.kind = "uniform";
  p.representation = "grid";
  p.lo = lo;
  p.hi = hi;
  return p;
}

}  // namespace

const std::vector<ScenarioInfo>& scenario_registry() {
  static const std::vector<ScenarioInfo> reg = {
      {"coin_tomography", "classical agent estimating the bias of coins from a source at theta = 3/4"},
      {"qubit_tomography", "quantum agent taking random Pauli measurements on copies of |+>"},
      {"classical_pair", "two coin agents, semicircle vs triangular(0.7) priors, expectation sampling"},
      {"classical_disjoint", "two coin agents with uniform priors on [0,1/3] and [2/3,1]"},
      {"quantum_pair_flat", "two qubit agents with uniform utilities, random Pauli measurements"},
      {"quantum_pair_biasedZ", "two qubit agents; Bob values Z outcomes at 0.98 / 1.02"},
      {"quinn_clark", "quantum SIC agent vs two-outcome classical agent via z projection and embedding"},
      {"quinn_clara_pauli", "quantum agent vs four-outcome classical agent, both measuring Paulis"},
      {"quinn_clara_sharp", "quantum agent vs four-outcome classical agent using sharp Pauli matrices"},
  };
  return reg;
}

bool is_known_scenario(const std::string& id) {
  if (id == "custom") return true;
  for (const auto& s : scenario_registry())
    if (s.id == id) return true;
  return false;
}

ScenarioConfig default_config(const std::string& id) {
  if (id == "coin_tomography") {
    ScenarioConfig c = base(id, 1000);
    c.snapshot_steps = {0, 10, 100, 1000};
    c.source = SourceSpec{"interval", {0.75}};
    c.agents = {coin_agent("agent", uniform_grid())};
    return c;
  }
  if (id == "qubit_tomography") {
    ScenarioConfig c = base(id, 500);
    c.snapshot_steps = {0, 10, 50, 500};
    c.source = SourceSpec{"bloch", {1.0, 0.0, 0.0}};
    c.agents = {qubit_agent("agent")};
    return c;
  }
  if (id == "classical_pair") {
    ScenarioConfig c = base(id, 1000);
    c.snapshot_steps.clear();
    for (long long s = 0; s <= 1000; s += 125) c.snapshot_steps.push_back(s);
    PriorSpec semi = uniform_grid();
    semi.kind = "semicircle";
    PriorSpec tri = uniform_grid();
    tri.kind = "triangular";
    tri.mode = 0.7;
    c.agents = {coin_agent("alice", semi), coin_agent("bob", tri)};
    return c;
  }
  if (id == "classical_disjoint") {
    ScenarioConfig c = base(id, 100);
    c.snapshot_steps = {0, 10, 30, 100};
    c.agents = {coin_agent("alice", uniform_grid(0.0, 1.0 / 3.0)), coin_agent("bob", uniform_grid(2.0 / 3.0, 1.0))};
    return c;
  }
  if (id == "quantum_pair_flat" || id == "quantum_pair_biasedZ") {
    ScenarioConfig c = base(id, 100);
    c.agents = {qubit_agent("alice"), qubit_agent("bob")};
    if (id == "quantum_pair_biasedZ") c.agents[1].menu[2].utilities = {0.98, 1.02};
    return c;
  }
  if (id == "quinn_clark") {
    ScenarioConfig c = base(id, 100);
    AgentSpec quinn = qubit_agent("quinn");
    ActionSpec sic;
    sic.name = "sic";
    sic.kind = "sic";
    quinn.menu = {sic};
    quinn.regularization = "z_embedding";
    AgentSpec clark = coin_agent("clark", uniform_grid());
    clark.menu[0].name = "Z";
    clark.menu[0].labels = {"+1", "-1"};
    clark.regularization = "z_projection";
    c.agents = {quinn, clark};
    return c;
  }
  if (id == "quinn_clara_pauli" || id == "quinn_clara_sharp") {
    ScenarioConfig c = base(id, 100);
    c.agents = {qubit_agent("quinn"), clara_agent(id == "quinn_clara_pauli" ? "pauli" : "sharp_pauli")};
    return c;
  }
  throw ConfigError({"unknown scenario '" + id + "'"});
}

// ---------------------------------------------------------------------------
// JSON

namespace {

class Reader {
 public:
  explicit Reader(std::vector<std::string>& errs) : errs_(errs) {}

  template <typename T>
  void get(const json& obj, const char* key, T& out, const std::string& path, bool required = false) {
    if (!obj.contains(key)) {
      if (required) errs_.push_back(path + "." + key + ": missing");
      return;
    }
    try {
      out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
      errs_.push_back(path + "." + key + ": wrong type");
    }
  }

  void only(const json& obj, const std::set<std::string>& keys, const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!keys.count(it.key())) errs_.push_back(path + "." + it.key() + ": unknown key");
  }

  bool object(const json& v, const std::string& path) {
    if (v.is_object()) return true;
    errs_.push_back(path + ": expected an object");
    return false;
  }

 private:
  std::vector<std::string>& errs_;
};

PriorSpec read_prior(const json& j, const std::string& path, Reader& r) {
  PriorSpec p;
  if (!r.object(j, path)) return p;
  r.only(j, {"kind", "representation", "lo", "hi", "alpha", "beta", "mode", "points", "weights", "n_particles",
             "grid_size"},
         path);
  r.get(j, "kind", p.kind, path, true);
  r.get(j, "representation", p.representation, path);
  r.get(j, "lo", p.lo, path);
  r.get(j, "hi", p.hi, path);
  r.get(j, "alpha", p.alpha, path);
  r.get(j, "beta", p.beta, path);
  r.get(j, "mode", p.mode, path);
  r.get(j, "points", p.points, path);
  r.get(j, "weights", p.weights, path);
  r.get(j, "n_particles", p.n_particles, path);
  r.get(j, "grid_size", p.grid_size, path);
  return p;
}

ActionSpec read_action(const json& j, const std::string& path, Reader& r) {
  ActionSpec a;
  if (!r.object(j, path)) return a;
  r.only(j, {"name", "kind", "axis", "rows", "utilities", "labels"}, path);
  r.get(j, "name", a.name, path);
  r.get(j, "kind", a.kind, path, true);
  r.get(j, "axis", a.axis, path);
  r.get(j, "rows", a.rows, path);
  r.get(j, "utilities", a.utilities, path);
  r.get(j, "labels", a.labels, path);
  return a;
}

AgentSpec read_agent(const json& j, const std::string& path, Reader& r, std::vector<std::string>& errs) {
  AgentSpec a;
  if (!r.object(j, path)) return a;
  r.only(j, {"id", "stream_key", "postulate", "n_outcomes", "chart", "prior", "menu", "regularization"}, path);
  r.get(j, "id", a.id, path, true);
  r.get(j, "stream_key", a.stream_key, path);
  if (a.stream_key.empty()) a.stream_key = a.id;
  r.get(j, "postulate", a.postulate, path, true);
  r.get(j, "n_outcomes", a.n_outcomes, path, true);
  r.get(j, "chart", a.chart, path);
  r.get(j, "regularization", a.regularization, path);
  if (j.contains("prior"))
    a.prior = read_prior(j.at("prior"), path + ".prior", r);
  else
    errs.push_back(path + ".prior: missing");
  if (!j.contains("menu")) {
    errs.push_back(path + ".menu: missing");
  } else if (!j.at("menu").is_array()) {
    errs.push_back(path + ".menu: expected an array");
  } else {
    const auto& m = j.at("menu");
    for (std::size_t i = 0; i < m.size(); ++i)
      a.menu.push_back(read_action(m.at(i), path + ".menu[" + std::to_string(i) + "]", r));
  }
  return a;
}

json write_prior(const PriorSpec& p) {
  return {{"kind", p.kind},     {"representation", p.representation}, {"lo", p.lo},
          {"hi", p.hi},         {"alpha", p.alpha},                   {"beta", p.beta},
          {"mode", p.mode},     {"points", p.points},                 {"weights", p.weights},
          {"n_particles", p.n_particles}, {"grid_size", p.grid_size}};
}

json write_action(const ActionSpec& a) {
  return {{"name", a.name},         {"kind", a.kind},     {"axis", a.axis},
          {"rows", a.rows},         {"utilities", a.utilities}, {"labels", a.labels}};
}

json write_agent(const AgentSpec& a) {
  json menu = json::array();
  for (const auto& act : a.menu) menu.push_back(write_action(act));
  return {{"id", a.id},
          {"stream_key", a.stream_key},
          {"postulate", a.postulate},
          {"n_outcomes", a.n_outcomes},
          {"chart", a.chart},
          {"prior", write_prior(a.prior)},
          {"menu", menu},
          {"regularization", a.regularization}};
}

}  // namespace

std::string emit_config(const ScenarioConfig& cfg) {
  json agents = json::array();
  for (const auto& a : cfg.agents) agents.push_back(write_agent(a));
  json j = {{"scenario", cfg.scenario},
            {"seed", cfg.seed},
            {"n_steps", cfg.n_steps},
            {"summary_interval", cfg.summary_interval},
            {"interaction", cfg.interaction},
            {"exchange", cfg.exchange},
            {"output_dir", cfg.output_dir},
            {"snapshot_steps", cfg.snapshot_steps},
            {"cloud_points", cfg.cloud_points},
            {"agents", agents}};
  if (cfg.source)
    j["source"] = {{"chart", cfg.source->chart}, {"point", cfg.source->point}};
  else
    j["source"] = nullptr;
  return j.dump(2);
}

ScenarioConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("malformed JSON: ") + e.what()});
  }
  std::vector<std::string> errs;
  Reader r(errs);
  ScenarioConfig c;
  if (!r.object(j, "config")) throw ConfigError(errs);
  r.only(j, {"scenario", "seed", "n_steps", "summary_interval", "interaction", "exchange", "output_dir",
             "snapshot_steps", "cloud_points", "source", "agents"},
         "config");
  r.get(j, "scenario", c.scenario, "config", true);
  r.get(j, "seed", c.seed, "config", true);
  r.get(j, "n_steps", c.n_steps, "config", true);
  r.get(j, "summary_interval", c.summary_interval, "config");
  r.get(j, "interaction", c.interaction, "config");
  r.get(j, "exchange", c.exchange, "config");
  r.get(j, "output_dir", c.output_dir, "config");
  r.get(j, "snapshot_steps", c.snapshot_steps, "config");
  r.get(j, "cloud_points", c.cloud_points, "config");
  if (j.contains("source") && !j.at("source").is_null()) {
    const auto& s = j.at("source");
    if (r.object(s, "config.source")) {
      r.only(s, {"chart", "point"}, "config.source");
      SourceSpec src;
      r.get(s, "chart", src.chart, "config.source", true);
      r.get(s, "point", src.point, "config.source", true);
      c.source = src;
    }
  }
  if (!j.contains("agents")) {
    errs.push_back("config.agents: missing");
  } else if (!j.at("agents").is_array()) {
    errs.push_back("config.agents: expected an array");
  } else {
    const auto& a = j.at("agents");
    for (std::size_t i = 0; i < a.size(); ++i)
      c.agents.push_back(read_agent(a.at(i), "config.agents[" + std::to_string(i) + "]", r, errs));
  }
  for (auto& v : validate_config(c)) errs.push_back(std::move(v));
  if (!errs.empty()) throw ConfigError(errs);
  return c;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

bool perfect_square(long long n) {
  if (n < 1) return false;
  const auto r = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(n))));
  return r * r == n;
}

bool in_ball(const std::vector<double>& p) {
  return p.size() == 3 && p[0] * p[0] + p[1] * p[1] + p[2] * p[2] <= 1.0 + kRegionTol;
}

bool in_region(const std::string& chart, const std::vector<double>& p, long long n) {
  if (chart == "interval") return p.size() == 1 && p[0] >= 0.0 && p[0] <= 1.0;
  if (chart == "bloch") return in_ball(p);
  if (chart == "simplex") {
    if (static_cast<long long>(p.size()) != n) return false;
    double s = 0.0;
    for (double v : p) {
      if (v < 0.0) return false;
      s += v;
    }
    return std::abs(s - 1.0) <= kProbTol;
  }
  return false;
}

long long action_outcomes(const ActionSpec& a, long long n) {
  if (a.kind == "pauli" || a.kind == "sharp_pauli") return 2;
  if (a.kind == "sic") return 4;
  if (a.kind == "trivial") return 1;
  if (a.kind == "identity") return n;
  if (a.kind == "matrix") return static_cast<long long>(a.rows.size());
  return -1;
}

bool prior_inside_ball(const AgentSpec& a) {
  if (a.chart != "bloch") return false;
  if (a.prior.kind == "atoms") {
    for (const auto& p : a.prior.points)
      if (!in_ball(p)) return false;
  }
  return true;
}

void validate_agent(const AgentSpec& a, const std::string& where, std::vector<std::string>& errs) {
  const bool quantum = a.postulate == "quantum_sic";
  if (a.id.empty()) errs.push_back(where + ": id must be nonempty");
  if (a.postulate != "classical" && !quantum) errs.push_back(where + ": postulate must be classical or quantum_sic");

  if (quantum) {
    if (!perfect_square(a.n_outcomes))
      errs.push_back(where + ": N=" + std::to_string(a.n_outcomes) + " is not the square of an integer");
    else if (a.n_outcomes != 4)
      errs.push_back(where + ": only the d=2 SIC reference action (N=4) is built in");
    if (a.chart != "bloch") errs.push_back(where + ": quantum agents use the bloch chart");
  } else {
    if (a.n_outcomes < 2) errs.push_back(where + ": n_outcomes must be at least 2");
    if (a.chart == "interval" && a.n_outcomes != 2) errs.push_back(where + ": interval chart needs n_outcomes = 2");
    if (a.chart == "bloch" && a.n_outcomes != 4) errs.push_back(where + ": bloch chart needs n_outcomes = 4");
    if (a.chart != "interval" && a.chart != "bloch" && a.chart != "simplex")
      errs.push_back(where + ": chart must be interval, bloch or simplex");
  }

  const PriorSpec& p = a.prior;
  const std::string pw = where + ".prior";
  static const std::set<std::string> kinds = {"uniform", "beta", "semicircle", "triangular", "atoms"};
  if (!kinds.count(p.kind)) errs.push_back(pw + ": unknown kind '" + p.kind + "'");
  if (p.kind == "atoms") {
    if (p.representation != "atoms") errs.push_back(pw + ": atoms priors use representation atoms");
    if (p.points.empty()) errs.push_back(pw + ": atoms prior needs points");
    if (p.points.size() != p.weights.size()) errs.push_back(pw + ": points and weights differ in count");
    double total = 0.0;
    for (double w : p.weights) {
      if (!(w >= 0.0)) errs.push_back(pw + ": weights must be nonnegative");
      total += w;
    }
    if (!(total > 0.0)) errs.push_back(pw + ": weights must have positive total");
    for (std::size_t i = 0; i < p.points.size(); ++i)
      if (!in_region(a.chart, p.points[i], a.n_outcomes))
        errs.push_back(pw + ": point " + std::to_string(i) + " lies outside the " + a.chart + " region");
  } else if (p.representation == "grid") {
    if (a.chart != "interval") errs.push_back(pw + ": grid representation needs the interval chart");
    if (p.grid_size < 2) errs.push_back(pw + ": grid_size must be at least 2");
  } else if (p.representation == "particles") {
    if (p.kind != "uniform") errs.push_back(pw + ": particle priors must be uniform on their support");
    if (p.n_particles < 1) errs.push_back(pw + ": n_particles must be positive");
  } else {
    errs.push_back(pw + ": representation must be grid, particles or atoms");
  }
  if (p.kind != "atoms" && p.kind != "uniform" && a.chart != "interval")
    errs.push_back(pw + ": " + p.kind + " priors need the interval chart");
  if (p.kind == "uniform" && a.chart == "interval" && !(p.lo >= 0.0 && p.lo < p.hi && p.hi <= 1.0))
    errs.push_back(pw + ": uniform support needs 0 <= lo < hi <= 1");
  if (p.kind == "beta" && !(p.alpha > 0.0 && p.beta > 0.0)) errs.push_back(pw + ": Beta parameters must be positive");
  if (p.kind == "triangular" && !(p.mode >= 0.0 && p.mode <= 1.0)) errs.push_back(pw + ": mode must lie in [0, 1]");

  if (a.menu.empty()) errs.push_back(where + ": menu must be nonempty");
  std::set<std::string> names;
  for (std::size_t i = 0; i < a.menu.size(); ++i) {
    const ActionSpec& act = a.menu[i];
    const std::string aw = where + ".menu[" + std::to_string(i) + "]";
    std::set<std::string> allowed;
    if (quantum)
      allowed = {"pauli", "sic", "trivial"};
    else if (a.n_outcomes == 4)
      allowed = {"pauli", "sharp_pauli", "sic", "trivial", "identity", "matrix"};
    else
      allowed = {"trivial", "identity", "matrix"};
    if (!allowed.count(act.kind)) {
      errs.push_back(aw + ": action kind '" + act.kind + "' is not available to this agent");
      continue;
    }
    if ((act.kind == "pauli" || act.kind == "sharp_pauli") && act.axis != "X" && act.axis != "Y" && act.axis != "Z")
      errs.push_back(aw + ": axis must be X, Y or Z");
    if (act.kind == "matrix") {
      if (act.rows.empty()) errs.push_back(aw + ": matrix needs rows");
      std::vector<double> col(static_cast<std::size_t>(std::max<long long>(a.n_outcomes, 0)), 0.0);
      bool shape_ok = true;
      for (const auto& row : act.rows) {
        if (static_cast<long long>(row.size()) != a.n_outcomes) {
          shape_ok = false;
          continue;
        }
        for (std::size_t k = 0; k < row.size(); ++k) {
          if (!(row[k] >= 0.0 && row[k] <= 1.0)) shape_ok = false;
          col[k] += row[k];
        }
      }
      if (!shape_ok) errs.push_back(aw + ": every row needs n_outcomes entries in [0, 1]");
      for (double s : col)
        if (shape_ok && std::abs(s - 1.0) > kProbTol) {
          errs.push_back(aw + ": matrix columns must sum to 1");
          break;
        }
    }
    const long long m = action_outcomes(act, a.n_outcomes);
    if (!act.utilities.empty()) {
      if (static_cast<long long>(act.utilities.size()) != m)
        errs.push_back(aw + ": needs " + std::to_string(m) + " utilities");
      for (double u : act.utilities)
        if (!std::isfinite(u)) errs.push_back(aw + ": utilities must be finite");
    }
    if (!act.labels.empty() && static_cast<long long>(act.labels.size()) != m)
      errs.push_back(aw + ": needs " + std::to_string(m) + " labels");
    const std::string nm = act.name.empty() ? act.kind + act.axis : act.name;
    if (!names.insert(nm).second) errs.push_back(aw + ": duplicate action name '" + nm + "'");
  }

  static const std::set<std::string> regs = {"none", "z_projection", "z_embedding", "support_restriction"};
  if (!regs.count(a.regularization)) errs.push_back(where + ": unknown regularization '" + a.regularization + "'");
  if (a.regularization == "support_restriction" && (quantum || a.chart != "bloch"))
    errs.push_back(where + ": support_restriction applies to classical agents on the bloch chart");
}

// Chart of whatever the agent receives from, "interval" or "bloch" or "simplex".
void validate_link(const AgentSpec& receiver, const std::string& from_chart, long long from_n, bool from_quantum,
                   const std::string& from_name, const std::string& where, std::vector<std::string>& errs) {
  const std::string& reg = receiver.regularization;
  if (reg == "z_projection") {
    if (receiver.chart != "interval" || from_chart != "bloch")
      errs.push_back(where + ": z_projection maps a bloch broadcast onto an interval agent");
  } else if (reg == "z_embedding") {
    if (receiver.chart != "bloch" || from_chart != "interval")
      errs.push_back(where + ": z_embedding maps an interval broadcast onto a bloch agent");
  } else if (from_n != receiver.n_outcomes) {
    errs.push_back(where + ": receives from " + from_name + " with a different reference size; a regularization is needed");
  } else if (receiver.postulate == "quantum_sic" && from_chart == "simplex") {
    errs.push_back(where + ": broadcasts from " + from_name + " may leave the Bloch ball");
  }
  if (from_quantum && receiver.postulate == "classical" && receiver.n_outcomes == 4) {
    if (receiver.regularization != "support_restriction" || !prior_inside_ball(receiver))
      errs.push_back(where + ": prior support must be restricted to the Bloch ball to interact with a quantum agent");
  }
}

}  // namespace

std::vector<std::string> validate_config(const ScenarioConfig& c) {
  std::vector<std::string> errs;
  if (!is_known_scenario(c.scenario)) errs.push_back("config.scenario: unknown scenario '" + c.scenario + "'");
  if (c.n_steps < 0) errs.push_back("config.n_steps: must be nonnegative");
  if (c.summary_interval < 1) errs.push_back("config.summary_interval: must be positive");
  if (c.cloud_points < 1) errs.push_back("config.cloud_points: must be positive");
  if (c.interaction != "expectation" && c.interaction != "prior_sampling")
    errs.push_back("config.interaction: must be expectation or prior_sampling");
  if (c.exchange != "simultaneous" && c.exchange != "turn_based")
    errs.push_back("config.exchange: must be simultaneous or turn_based");
  for (long long s : c.snapshot_steps)
    if (s < 0 || s > c.n_steps) errs.push_back("config.snapshot_steps: step " + std::to_string(s) + " out of range");

  std::set<std::string> ids;
  std::set<std::string> keys;
  for (std::size_t i = 0; i < c.agents.size(); ++i) {
    const std::string where = "config.agents[" + std::to_string(i) + "]";
    validate_agent(c.agents[i], where, errs);
    if (!ids.insert(c.agents[i].id).second) errs.push_back(where + ": duplicate id '" + c.agents[i].id + "'");
    if (!keys.insert(c.agents[i].stream_key).second)
      errs.push_back(where + ": duplicate stream_key '" + c.agents[i].stream_key + "'");
  }

  if (c.source) {
    if (c.agents.size() != 1) errs.push_back("config.agents: a run with a source needs exactly one agent");
    const SourceSpec& s = *c.source;
    if (s.chart != "interval" && s.chart != "bloch") errs.push_back("config.source.chart: must be interval or bloch");
    else if (!in_region(s.chart, s.point, 0)) errs.push_back("config.source.point: outside the " + s.chart + " region");
    if (c.agents.size() == 1)
      validate_link(c.agents[0], s.chart, s.chart == "bloch" ? 4 : 2, s.chart == "bloch", "the source",
                    "config.agents[0]", errs);
  } else {
    if (c.agents.size() != 2) errs.push_back("config.agents: an interaction needs exactly two agents");
    if (c.agents.size() == 2) {
      for (std::size_t i = 0; i < 2; ++i) {
        const AgentSpec& from = c.agents[1 - i];
        validate_link(c.agents[i], from.chart, from.n_outcomes, from.postulate == "quantum_sic", from.id,
                      "config.agents[" + std::to_string(i) + "]", errs);
      }
    }
  }
  return errs;
}

// ---------------------------------------------------------------------------
// Building

namespace {

PauliAxis parse_axis(const std::string& s) {
  if (s == "X") return PauliAxis::X;
  if (s == "Y") return PauliAxis::Y;
  return PauliAxis::Z;
}

Regularization parse_regularization(const std::string& s) {
  if (s == "z_projection") return Regularization::ZProjection;
  if (s == "z_embedding") return Regularization::ZEmbedding;
  if (s == "support_restriction") return Regularization::SupportRestriction;
  return Regularization::None;
}

double semicircle_pdf(double x) {
  const double u = 2.0 * x - 1.0;
  return std::sqrt(std::max(0.0, 1.0 - u * u));
}

std::function<double(double)> triangular_pdf(double c) {
  return [c](double x) {
    if (x < c) return 2.0 * x / c;
    if (c == 1.0) return 2.0 * x;
    return 2.0 * (1.0 - x) / (1.0 - c);
  };
}

ParticleEnsemble build_prior(const AgentSpec& a, const ParameterChart& chart, std::uint64_t seed) {
  const PriorSpec& p = a.prior;
  if (p.kind == "atoms") {
    std::vector<Eigen::VectorXd> pts;
    for (const auto& v : p.points) pts.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    return ParticleEnsemble::atoms(chart, pts, p.weights);
  }
  if (p.representation == "particles") {
    RngStream rng = RngStream::derive(seed, a.stream_key + "/prior");
    Support support = Support::simplex();
    if (chart.kind() == ChartKind::Interval) support = Support::interval(p.lo, p.hi);
    if (chart.kind() == ChartKind::Bloch) support = Support::ball();
    return sample_uniform(chart, support, static_cast<std::size_t>(p.n_particles), rng);
  }
  const auto n = static_cast<std::size_t>(p.grid_size);
  if (p.kind == "uniform") return ParticleEnsemble::grid([](double) { return 1.0; }, p.lo, p.hi, n);
  if (p.kind == "beta") return ParticleEnsemble::grid(Density1D::from_beta(BetaParams(p.alpha, p.beta), n));
  if (p.kind == "semicircle") return ParticleEnsemble::grid(semicircle_pdf, 0.0, 1.0, n);
  return ParticleEnsemble::grid(triangular_pdf(p.mode), 0.0, 1.0, n);
}

Action build_action(const ActionSpec& s, const AgentSpec& a, const ReferenceAction& sic) {
  const auto n = static_cast<std::size_t>(a.n_outcomes);
  Action act;
  if (s.kind == "pauli") {
    act = pauli_action(parse_axis(s.axis), sic);
  } else if (s.kind == "sharp_pauli") {
    act = sharp_pauli_action(parse_axis(s.axis), sic);
  } else if (s.kind == "sic") {
    act = reference_action(sic);
  } else if (s.kind == "trivial") {
    act = trivial_action(n);
  } else if (s.kind == "identity") {
    act = identity_action("identity", n);
  } else {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(s.rows.size()), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < s.rows.size(); ++j)
      for (std::size_t i = 0; i < n; ++i) m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = s.rows[j][i];
    act = matrix_action("matrix", CondProbMatrix(m));
  }
  if (!s.name.empty()) act.name = s.name;
  if (!s.labels.empty()) act.outcome_labels = s.labels;
  if (!s.utilities.empty())
    act.utility = Eigen::Map<const Eigen::VectorXd>(s.utilities.data(), static_cast<Eigen::Index>(s.utilities.size()));
  return act;
}

}  // namespace

Simulation build_simulation(const ScenarioConfig& cfg) {
  if (auto errs = validate_config(cfg); !errs.empty()) throw ConfigError(errs);
  const ReferenceAction sic = sic_d2();

  Simulation sim;
  sim.scenario = cfg.scenario;
  sim.seed = cfg.seed;
  sim.n_steps = cfg.n_steps;
  sim.summary_interval = cfg.summary_interval;
  sim.mode = cfg.interaction == "expectation" ? InteractionMode::Expectation : InteractionMode::PriorSampling;
  sim.exchange = cfg.exchange == "simultaneous" ? ExchangeMode::Simultaneous : ExchangeMode::TurnBased;
  sim.snapshot_steps = cfg.snapshot_steps;
  sim.cloud_points = static_cast<std::size_t>(cfg.cloud_points);

  for (const auto& a : cfg.agents) {
    const auto n = static_cast<std::size_t>(a.n_outcomes);
    const PhysicalPostulate post =
        a.postulate == "quantum_sic" ? PhysicalPostulate::quantum(sic) : PhysicalPostulate::classical(n);
    const ParameterChart chart = a.chart == "interval" ? ParameterChart::interval()
                                 : a.chart == "bloch"  ? ParameterChart::bloch(sic)
                                                       : ParameterChart::simplex(n);
    std::vector<Action> menu;
    for (const auto& s : a.menu) menu.push_back(build_action(s, a, sic));
    sim.agents.emplace_back(a.id, a.stream_key, post, build_prior(a, chart, cfg.seed), std::move(menu));
    sim.regularization.push_back(parse_regularization(a.regularization));
  }
  if (cfg.source) {
    const auto& s = *cfg.source;
    sim.source = ExogenousSource{s.chart == "bloch" ? ParameterChart::bloch(sic) : ParameterChart::interval(),
                                 Eigen::Map<const Eigen::VectorXd>(s.point.data(), static_cast<Eigen::Index>(s.point.size()))};
  }
  return sim;
}

Trace run_scenario(const ScenarioConfig& cfg) {
  Trace t = run(build_simulation(cfg));
  t.config_json = emit_config(cfg);
  return t;
}

}  // namespace qbagents
