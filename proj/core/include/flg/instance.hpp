#ifndef FLG_INSTANCE_HPP
#define FLG_INSTANCE_HPP

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "flg/numeric.hpp"

namespace flg {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Agent {
  int home = 0;
  double weight = 1.0;
};

enum class MetricFlag { kUnchecked, kAssertedMetric, kAssertedNonmetric };

// One chosen node per agent.
using StrategyProfile = std::vector<int>;

// A Facility Location game: complete network with symmetric edge costs,
// per-node facility opening costs, and agents with a home node and a
// positive demand weight. Immutable after construction/validation; all
// evaluation functions are pure in (instance, profile).
struct GameInstance {
  int node_count = 0;
  std::vector<double> distances;      // dense row-major node_count x node_count
  std::vector<double> facility_costs; // beta_v per node
  std::vector<Agent> agents;
  MetricFlag metric_flag = MetricFlag::kUnchecked;

  // Non-semantic key/value annotations carried through the file format
  // (comment lines of the form "# key: value"), e.g. generator parameters
  // or a declared start profile.
  std::map<std::string, std::string> annotations;

  int num_agents() const { return static_cast<int>(agents.size()); }
  double dist(int u, int v) const { return distances[static_cast<size_t>(u) * node_count + v]; }
  void set_dist(int u, int v, double d) {
    distances[static_cast<size_t>(u) * node_count + v] = d;
    distances[static_cast<size_t>(v) * node_count + u] = d;
  }
  double total_weight() const;

  // Throws ValidationError on: bad sizes, negative distances, nonzero
  // diagonal, asymmetry, non-positive weights, out-of-range homes.
  void validate() const;
};

struct MetricReport {
  bool is_metric = false;
  // (u, v, w) with d(u,w) > d(u,v) + d(v,w) beyond tolerance.
  std::vector<std::array<int, 3>> violations;
};

struct CostBreakdown {
  std::vector<double> per_agent_connection;
  std::vector<double> per_agent_share;
  std::map<int, double> facility_loads; // node -> total weight W_s(v), occupied nodes only
  std::vector<int> open_facilities;     // F_s, ascending
  double social_cost = 0.0;
};

// Instance file format (UTF-8 text, '#' lines are comments):
//   flg-instance v1
//   nodes: <m>
//   facility_costs: <b0> ... <b_{m-1}>
//   distances:
//   <m lines of m reals>
//   agents: <n>
//   <n lines: home weight>
//   metric: true|false          (optional)
// Comment lines of the form "# key: value" become annotations.
GameInstance load_instance(const std::string& text);
GameInstance load_instance_file(const std::string& path);
std::string save_instance(const GameInstance& inst);
void save_instance_file(const GameInstance& inst, const std::string& path);

// Checks every triangle inequality within kCmpEps, collects violations,
// and stamps inst.metric_flag accordingly.
MetricReport validate_metric(GameInstance& inst);
MetricReport check_metric(const GameInstance& inst);

void validate_profile(const GameInstance& inst, const StrategyProfile& s);

// c_i(s) = w_i d(u_i, s_i) + w_i beta_{s_i} / W_s(s_i)
double agent_cost(const GameInstance& inst, const StrategyProfile& s, int agent);

// Total weight choosing node v under s.
double facility_load(const GameInstance& inst, const StrategyProfile& s, int v);

CostBreakdown social_cost(const GameInstance& inst, const StrategyProfile& s);

// Shorthand when only the total is needed.
double social_cost_value(const GameInstance& inst, const StrategyProfile& s);

struct WeightedEdge {
  int u = 0;
  int v = 0;
  double length = 0.0;
};

// Partial instance given as a weighted edge list; metric_closure completes
// it with all-pairs shortest-path distances.
struct EdgeListInstance {
  int node_count = 0;
  std::vector<WeightedEdge> edges;
  std::vector<double> facility_costs;
  std::vector<Agent> agents;
};

// All-pairs shortest-path completion. Errors if the graph is disconnected
// or if the closure shortens a specified edge (an inconsistent construction).
// The result carries metric_flag = kAssertedMetric.
GameInstance metric_closure(const EdgeListInstance& partial);

StrategyProfile parse_profile(const std::string& text, int num_agents, int node_count);
std::string format_profile(const StrategyProfile& s);

}  // namespace flg

#endif
