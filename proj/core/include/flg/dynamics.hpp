#ifndef FLG_DYNAMICS_HPP
#define FLG_DYNAMICS_HPP

#include <map>
#include <string>
#include <vector>

#include "flg/instance.hpp"

namespace flg {

// Node minimizing agent i's cost with the rest of the profile fixed
// (joining a node counts i's weight in the share denominator). Ties are
// broken by the current strategy first, then by lowest node index.
int best_response(const GameInstance& inst, const StrategyProfile& s, int agent);

enum class OrderPolicy {
  kRoundRobin,
  // The proof order: agents grouped by their start-profile facility,
  // facilities ascending, agents within a facility ascending.
  kFacilityConsecutive,
  kExplicit,
};

struct IbrStep {
  int agent = 0;
  int from = 0;
  int to = 0;
  double delta_agent_cost = 0.0; // < 0 for an improving move
  double delta_social = 0.0;
  double potential_after = 0.0; // NaN on weighted instances
};

struct DynamicsTrace {
  StrategyProfile start_profile;
  std::vector<IbrStep> steps;
  StrategyProfile final_profile;
  bool converged = false;
};

inline int default_max_steps(const GameInstance& inst) {
  return 10 * inst.num_agents() * inst.node_count * inst.node_count;
}

// Iterative best response. Sweeps the agent order repeatedly, applying every
// strictly improving best response, until a full sweep makes no move or
// max_steps improving moves were applied (converged = false in that case;
// expected only on weighted instances).
DynamicsTrace run_ibr(const GameInstance& inst, const StrategyProfile& start, OrderPolicy policy,
                      int max_steps, const std::vector<int>& explicit_order = {});

// Exact potential for unweighted instances:
// Phi(s) = sum_i d(u_i, s_i) + sum_{v in F_s} beta_v H(n_v(s)).
// A unilateral move changes Phi by exactly the mover's cost change.
// Throws on weighted instances.
double potential(const GameInstance& inst, const StrategyProfile& s);

// Trace CSV: step,agent,from,to,delta_agent_cost,delta_social,potential
std::string trace_csv(const DynamicsTrace& trace);

// Replay of the charging scheme from the iterative-best-response lemma:
// labels start as the identity, a per-(label, node) join-time occupancy is
// tracked, and the social-cost delta of each deviation is charged to the
// label that carried the leave-time occupancy (relabeling the mover when
// needed). Join-time values for the start facilities are initialized from
// the observed first-deviation order (two passes over the trace), so each
// agent's own label carries the bound beta_v / |A^i_{s*}(v)|.
struct ChargingState {
  std::vector<int> label_of_agent;              // current permutation
  std::map<std::pair<int, int>, int> join_occupancy; // (label, node) -> occupancy right after joining
  std::vector<double> charge_of_label;          // accumulated social-cost deltas
  std::map<int, std::vector<int>> initial_groups; // v -> A_{s*}(v)
  std::map<int, std::vector<int>> survivors;      // v -> agents that never left v
  std::vector<int> lambda_init;                 // per agent: initialized join value at its s* facility
  std::vector<int> first_deviation_group_size;  // per agent: |A^i_{s*}(v)|, 0 if it never deviated
};

struct ChargingCaseRecord {
  int step = 0;
  int agent = 0;
  int charged_label = 0;
  int case_tag = 0; // 1..4 per the leave/join occupancy split
  double delta_social = 0.0;
  double case_bound = 0.0;   // per-case upper bound on the delta
  double first_dev_bound = 0.0; // beta_v / |A^i_{s*}(v)| when this is a first deviation, else NaN
};

struct ChargingAudit {
  ChargingState state;
  std::vector<ChargingCaseRecord> records;
  bool pass = false;
  std::string failure;
  double total_charge = 0.0;   // equals c(final) - c(start) when the audit passes
  double cost_delta = 0.0;
};

// Requires an unweighted instance and trace.start_profile == s_star.
ChargingAudit charging_audit(const GameInstance& inst, const DynamicsTrace& trace,
                             const StrategyProfile& s_star);

}  // namespace flg

#endif
