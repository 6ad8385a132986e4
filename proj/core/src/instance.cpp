#include "flg/instance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace flg {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_real(const std::string& tok, const std::string& what) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    throw ParseError("bad real for " + what + ": '" + tok + "'");
  }
  return v;
}

long parse_int(const std::string& tok, const std::string& what) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0') {
    throw ParseError("bad integer for " + what + ": '" + tok + "'");
  }
  return v;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

// Reads lines, skipping blanks; '#' lines are collected as annotations when
// they look like "# key: value".
struct LineReader {
  std::istringstream in;
  std::map<std::string, std::string>* annotations;
  int lineno = 0;

  explicit LineReader(const std::string& text, std::map<std::string, std::string>* ann)
      : in(text), annotations(ann) {}

  bool next(std::string& out) {
    std::string line;
    while (std::getline(in, line)) {
      ++lineno;
      line = trim(line);
      if (line.empty()) continue;
      if (line[0] == '#') {
        std::string body = trim(line.substr(1));
        size_t colon = body.find(':');
        if (annotations && colon != std::string::npos && colon > 0) {
          std::string key = trim(body.substr(0, colon));
          std::string val = trim(body.substr(colon + 1));
          if (!key.empty() && key.find(' ') == std::string::npos) {
            (*annotations)[key] = val;
          }
        }
        continue;
      }
      out = line;
      return true;
    }
    return false;
  }

  std::string require(const std::string& what) {
    std::string line;
    if (!next(line)) throw ParseError("unexpected end of file, expected " + what);
    return line;
  }
};

std::string expect_prefix(const std::string& line, const std::string& prefix) {
  if (line.rfind(prefix, 0) != 0) {
    throw ParseError("expected '" + prefix + "' line, got: '" + line + "'");
  }
  return trim(line.substr(prefix.size()));
}

}  // namespace

double GameInstance::total_weight() const {
  double w = 0.0;
  for (const Agent& a : agents) w += a.weight;
  return w;
}

void GameInstance::validate() const {
  const int m = node_count;
  if (m <= 0) throw ValidationError("node_count must be positive");
  if (distances.size() != static_cast<size_t>(m) * m) {
    throw ValidationError("distance matrix size mismatch");
  }
  if (facility_costs.size() != static_cast<size_t>(m)) {
    throw ValidationError("facility_costs size mismatch");
  }
  for (int v = 0; v < m; ++v) {
    if (!(facility_costs[v] >= 0.0) || !std::isfinite(facility_costs[v])) {
      throw ValidationError("facility cost at node " + std::to_string(v) + " must be >= 0");
    }
  }
  for (int u = 0; u < m; ++u) {
    if (dist(u, u) != 0.0) {
      throw ValidationError("nonzero diagonal at node " + std::to_string(u));
    }
    for (int v = 0; v < m; ++v) {
      double d = dist(u, v);
      if (!(d >= 0.0) || !std::isfinite(d)) {
        throw ValidationError("negative or non-finite distance d(" + std::to_string(u) + "," +
                              std::to_string(v) + ")");
      }
      if (dist(u, v) != dist(v, u)) {
        throw ValidationError("asymmetric distance d(" + std::to_string(u) + "," +
                              std::to_string(v) + ")");
      }
    }
  }
  if (agents.empty()) throw ValidationError("at least one agent required");
  for (size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].home < 0 || agents[i].home >= m) {
      throw ValidationError("agent " + std::to_string(i) + " home out of range");
    }
    if (!(agents[i].weight > 0.0) || !std::isfinite(agents[i].weight)) {
      throw ValidationError("agent " + std::to_string(i) + " weight must be > 0");
    }
  }
  if (metric_flag == MetricFlag::kAssertedMetric && !check_metric(*this).is_metric) {
    throw ValidationError("instance asserts metric but violates the triangle inequality");
  }
}

GameInstance load_instance(const std::string& text) {
  GameInstance inst;
  LineReader rd(text, &inst.annotations);

  std::string line = rd.require("header");
  if (line != "flg-instance v1") throw ParseError("missing 'flg-instance v1' header");

  inst.node_count = static_cast<int>(parse_int(expect_prefix(rd.require("nodes"), "nodes:"), "nodes"));
  if (inst.node_count <= 0) throw ParseError("nodes must be positive");
  const int m = inst.node_count;

  {
    std::vector<std::string> toks = split_ws(expect_prefix(rd.require("facility_costs"), "facility_costs:"));
    if (static_cast<int>(toks.size()) != m) {
      throw ParseError("facility_costs: expected " + std::to_string(m) + " values, got " +
                       std::to_string(toks.size()));
    }
    for (const std::string& t : toks) inst.facility_costs.push_back(parse_real(t, "facility cost"));
  }

  expect_prefix(rd.require("distances"), "distances:");
  inst.distances.assign(static_cast<size_t>(m) * m, 0.0);
  for (int u = 0; u < m; ++u) {
    std::vector<std::string> toks = split_ws(rd.require("distance row"));
    if (static_cast<int>(toks.size()) != m) {
      throw ParseError("distance row " + std::to_string(u) + ": expected " + std::to_string(m) +
                       " values, got " + std::to_string(toks.size()));
    }
    for (int v = 0; v < m; ++v) {
      inst.distances[static_cast<size_t>(u) * m + v] = parse_real(toks[v], "distance");
    }
  }

  int n = static_cast<int>(parse_int(expect_prefix(rd.require("agents"), "agents:"), "agents"));
  if (n <= 0) throw ParseError("agents must be positive");
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> toks = split_ws(rd.require("agent line"));
    if (toks.size() != 2) throw ParseError("agent line " + std::to_string(i) + ": expected 'home weight'");
    Agent a;
    a.home = static_cast<int>(parse_int(toks[0], "agent home"));
    a.weight = parse_real(toks[1], "agent weight");
    inst.agents.push_back(a);
  }

  std::string tail;
  while (rd.next(tail)) {
    if (tail.rfind("metric:", 0) == 0) {
      std::string val = trim(tail.substr(7));
      if (val == "true") {
        inst.metric_flag = MetricFlag::kAssertedMetric;
      } else if (val == "false") {
        inst.metric_flag = MetricFlag::kAssertedNonmetric;
      } else {
        throw ParseError("metric: expects true|false");
      }
    } else {
      throw ParseError("unexpected trailing line: '" + tail + "'");
    }
  }

  inst.validate();
  return inst;
}

GameInstance load_instance_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open instance file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return load_instance(ss.str());
}

std::string save_instance(const GameInstance& inst) {
  std::ostringstream out;
  for (const auto& [key, val] : inst.annotations) {
    out << "# " << key << ": " << val << "\n";
  }
  out << "flg-instance v1\n";
  out << "nodes: " << inst.node_count << "\n";
  out << "facility_costs:";
  for (double b : inst.facility_costs) out << " " << fmt_full(b);
  out << "\n";
  out << "distances:\n";
  for (int u = 0; u < inst.node_count; ++u) {
    for (int v = 0; v < inst.node_count; ++v) {
      if (v) out << " ";
      out << fmt_full(inst.dist(u, v));
    }
    out << "\n";
  }
  out << "agents: " << inst.num_agents() << "\n";
  for (const Agent& a : inst.agents) {
    out << a.home << " " << fmt_full(a.weight) << "\n";
  }
  if (inst.metric_flag == MetricFlag::kAssertedMetric) out << "metric: true\n";
  if (inst.metric_flag == MetricFlag::kAssertedNonmetric) out << "metric: false\n";
  return out.str();
}

void save_instance_file(const GameInstance& inst, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot write instance file: " + path);
  f << save_instance(inst);
}

MetricReport check_metric(const GameInstance& inst) {
  MetricReport rep;
  rep.is_metric = true;
  const int m = inst.node_count;
  for (int u = 0; u < m; ++u) {
    for (int v = 0; v < m; ++v) {
      if (v == u) continue;
      for (int w = 0; w < m; ++w) {
        if (w == u || w == v) continue;
        if (inst.dist(u, w) > inst.dist(u, v) + inst.dist(v, w) + kCmpEps) {
          rep.is_metric = false;
          rep.violations.push_back({u, v, w});
        }
      }
    }
  }
  return rep;
}

MetricReport validate_metric(GameInstance& inst) {
  MetricReport rep = check_metric(inst);
  inst.metric_flag = rep.is_metric ? MetricFlag::kAssertedMetric : MetricFlag::kAssertedNonmetric;
  return rep;
}

void validate_profile(const GameInstance& inst, const StrategyProfile& s) {
  if (static_cast<int>(s.size()) != inst.num_agents()) {
    throw ValidationError("profile length " + std::to_string(s.size()) + " != agent count " +
                          std::to_string(inst.num_agents()));
  }
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0 || s[i] >= inst.node_count) {
      throw ValidationError("profile entry " + std::to_string(i) + " out of range");
    }
  }
}

double facility_load(const GameInstance& inst, const StrategyProfile& s, int v) {
  double w = 0.0;
  for (int i = 0; i < inst.num_agents(); ++i) {
    if (s[i] == v) w += inst.agents[i].weight;
  }
  return w;
}

double agent_cost(const GameInstance& inst, const StrategyProfile& s, int agent) {
  const Agent& a = inst.agents[agent];
  const int v = s[agent];
  double load = facility_load(inst, s, v); // >= a.weight > 0
  return a.weight * inst.dist(a.home, v) + a.weight * inst.facility_costs[v] / load;
}

CostBreakdown social_cost(const GameInstance& inst, const StrategyProfile& s) {
  CostBreakdown cb;
  const int n = inst.num_agents();
  cb.per_agent_connection.resize(n);
  cb.per_agent_share.resize(n);
  for (int i = 0; i < n; ++i) {
    cb.facility_loads[s[i]] += inst.agents[i].weight;
  }
  for (const auto& [v, load] : cb.facility_loads) {
    (void)load;
    cb.open_facilities.push_back(v);
  }
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const Agent& a = inst.agents[i];
    cb.per_agent_connection[i] = a.weight * inst.dist(a.home, s[i]);
    cb.per_agent_share[i] = a.weight * inst.facility_costs[s[i]] / cb.facility_loads[s[i]];
    total += cb.per_agent_connection[i] + cb.per_agent_share[i];
  }
  cb.social_cost = total;
  return cb;
}

double social_cost_value(const GameInstance& inst, const StrategyProfile& s) {
  double total = 0.0;
  std::map<int, double> loads;
  for (int i = 0; i < inst.num_agents(); ++i) loads[s[i]] += inst.agents[i].weight;
  for (int i = 0; i < inst.num_agents(); ++i) {
    const Agent& a = inst.agents[i];
    total += a.weight * inst.dist(a.home, s[i]) + a.weight * inst.facility_costs[s[i]] / loads[s[i]];
  }
  return total;
}

GameInstance metric_closure(const EdgeListInstance& partial) {
  const int m = partial.node_count;
  if (m <= 0) throw ValidationError("node_count must be positive");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> d(static_cast<size_t>(m) * m, kInf);
  for (int u = 0; u < m; ++u) d[static_cast<size_t>(u) * m + u] = 0.0;
  for (const WeightedEdge& e : partial.edges) {
    if (e.u < 0 || e.u >= m || e.v < 0 || e.v >= m) throw ValidationError("edge endpoint out of range");
    if (!(e.length >= 0.0) || !std::isfinite(e.length)) throw ValidationError("edge length must be >= 0");
    size_t uv = static_cast<size_t>(e.u) * m + e.v;
    size_t vu = static_cast<size_t>(e.v) * m + e.u;
    d[uv] = std::min(d[uv], e.length);
    d[vu] = std::min(d[vu], e.length);
  }
  // Floyd-Warshall; m stays small at desk scale.
  for (int k = 0; k < m; ++k) {
    for (int u = 0; u < m; ++u) {
      double duk = d[static_cast<size_t>(u) * m + k];
      if (duk == kInf) continue;
      for (int v = 0; v < m; ++v) {
        double alt = duk + d[static_cast<size_t>(k) * m + v];
        double& cur = d[static_cast<size_t>(u) * m + v];
        if (alt < cur) cur = alt;
      }
    }
  }
  for (double x : d) {
    if (x == kInf) throw ValidationError("metric_closure: graph is disconnected");
  }
  for (const WeightedEdge& e : partial.edges) {
    double closed = d[static_cast<size_t>(e.u) * m + e.v];
    if (closed < e.length - kCmpEps) {
      throw ValidationError("metric_closure shortens specified edge (" + std::to_string(e.u) + "," +
                            std::to_string(e.v) + "): " + fmt_full(e.length) + " -> " + fmt_full(closed));
    }
  }
  GameInstance inst;
  inst.node_count = m;
  inst.distances = std::move(d);
  inst.facility_costs = partial.facility_costs;
  inst.agents = partial.agents;
  inst.metric_flag = MetricFlag::kAssertedMetric;
  inst.validate();
  return inst;
}

StrategyProfile parse_profile(const std::string& text, int num_agents, int node_count) {
  StrategyProfile s;
  std::string tok;
  std::istringstream is(text);
  while (std::getline(is, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) throw ParseError("empty entry in profile '" + text + "'");
    s.push_back(static_cast<int>(parse_int(tok, "profile entry")));
  }
  if (static_cast<int>(s.size()) != num_agents) {
    throw ParseError("profile has " + std::to_string(s.size()) + " entries, expected " +
                     std::to_string(num_agents));
  }
  for (int v : s) {
    if (v < 0 || v >= node_count) throw ParseError("profile node index out of range: " + std::to_string(v));
  }
  return s;
}

std::string format_profile(const StrategyProfile& s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out;
}

}  // namespace flg
