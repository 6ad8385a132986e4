#include "flg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "flg/bounds.hpp"

namespace flg {

namespace {

bool is_unweighted(const GameInstance& inst) {
  for (const Agent& a : inst.agents) {
    if (a.weight != 1.0) return false;
  }
  return true;
}

std::vector<double> all_loads(const GameInstance& inst, const StrategyProfile& s) {
  std::vector<double> loads(inst.node_count, 0.0);
  for (int i = 0; i < inst.num_agents(); ++i) loads[s[i]] += inst.agents[i].weight;
  return loads;
}

int best_response_with_loads(const GameInstance& inst, const StrategyProfile& s, int agent,
                             const std::vector<double>& loads) {
  const Agent& a = inst.agents[agent];
  const int cur = s[agent];
  double best_cost = a.weight * inst.dist(a.home, cur) + a.weight * inst.facility_costs[cur] / loads[cur];
  int best = cur;
  for (int v = 0; v < inst.node_count; ++v) {
    if (v == cur) continue;
    double load = loads[v] + a.weight;
    double c = a.weight * inst.dist(a.home, v) + a.weight * inst.facility_costs[v] / load;
    if (c < best_cost - kCmpEps) {
      best_cost = c;
      best = v;
    }
  }
  return best;
}

}  // namespace

int best_response(const GameInstance& inst, const StrategyProfile& s, int agent) {
  return best_response_with_loads(inst, s, agent, all_loads(inst, s));
}

double potential(const GameInstance& inst, const StrategyProfile& s) {
  if (!is_unweighted(inst)) {
    throw std::invalid_argument("potential: defined for unweighted instances only");
  }
  std::vector<int> occupancy(inst.node_count, 0);
  double phi = 0.0;
  for (int i = 0; i < inst.num_agents(); ++i) {
    phi += inst.dist(inst.agents[i].home, s[i]);
    ++occupancy[s[i]];
  }
  for (int v = 0; v < inst.node_count; ++v) {
    if (occupancy[v] > 0) phi += inst.facility_costs[v] * bounds::harmonic(occupancy[v]);
  }
  return phi;
}

DynamicsTrace run_ibr(const GameInstance& inst, const StrategyProfile& start, OrderPolicy policy,
                      int max_steps, const std::vector<int>& explicit_order) {
  validate_profile(inst, start);
  if (max_steps < 1) throw std::invalid_argument("run_ibr: max_steps must be >= 1");
  const int n = inst.num_agents();

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (policy == OrderPolicy::kFacilityConsecutive) {
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return start[a] < start[b]; });
  } else if (policy == OrderPolicy::kExplicit) {
    if (explicit_order.size() != static_cast<size_t>(n)) {
      throw std::invalid_argument("run_ibr: explicit order must list every agent once");
    }
    std::vector<bool> seen(n, false);
    for (int i : explicit_order) {
      if (i < 0 || i >= n || seen[i]) throw std::invalid_argument("run_ibr: explicit order is not a permutation");
      seen[i] = true;
    }
    order = explicit_order;
  }

  const bool unweighted = is_unweighted(inst);
  DynamicsTrace trace;
  trace.start_profile = start;
  StrategyProfile cur = start;
  std::vector<double> loads = all_loads(inst, cur);
  double cur_social = social_cost_value(inst, cur);

  int moves = 0;
  bool moved_in_sweep = true;
  while (moved_in_sweep && moves < max_steps) {
    moved_in_sweep = false;
    for (int idx = 0; idx < n && moves < max_steps; ++idx) {
      int i = order[idx];
      int from = cur[i];
      int to = best_response_with_loads(inst, cur, i, loads);
      if (to == from) continue;
      double before = agent_cost(inst, cur, i);
      loads[from] -= inst.agents[i].weight;
      loads[to] += inst.agents[i].weight;
      cur[i] = to;
      double after = agent_cost(inst, cur, i);
      double new_social = social_cost_value(inst, cur);
      IbrStep step;
      step.agent = i;
      step.from = from;
      step.to = to;
      step.delta_agent_cost = after - before;
      step.delta_social = new_social - cur_social;
      step.potential_after =
          unweighted ? potential(inst, cur) : std::numeric_limits<double>::quiet_NaN();
      trace.steps.push_back(step);
      cur_social = new_social;
      ++moves;
      moved_in_sweep = true;
    }
  }
  trace.final_profile = cur;
  trace.converged = !moved_in_sweep;
  return trace;
}

std::string trace_csv(const DynamicsTrace& trace) {
  std::ostringstream out;
  out << "step,agent,from,to,delta_agent_cost,delta_social,potential\n";
  for (size_t t = 0; t < trace.steps.size(); ++t) {
    const IbrStep& s = trace.steps[t];
    out << t << "," << s.agent << "," << s.from << "," << s.to << "," << fmt_full(s.delta_agent_cost)
        << "," << fmt_full(s.delta_social) << "," << fmt_full(s.potential_after) << "\n";
  }
  return out.str();
}

ChargingAudit charging_audit(const GameInstance& inst, const DynamicsTrace& trace,
                             const StrategyProfile& s_star) {
  if (!is_unweighted(inst)) {
    throw std::invalid_argument("charging_audit: unweighted instances only");
  }
  validate_profile(inst, s_star);
  if (trace.start_profile != s_star) {
    throw std::invalid_argument("charging_audit: trace does not start at the declared s*");
  }
  const int n = inst.num_agents();

  ChargingAudit audit;
  ChargingState& st = audit.state;

  // A_{s*}(v) and first-deviation bookkeeping.
  for (int i = 0; i < n; ++i) st.initial_groups[s_star[i]].push_back(i);

  // Pass 1: observed order of first deviations per start facility. An
  // agent's first move in the trace necessarily leaves its s* facility.
  std::vector<int> first_dev_seq(n, -1); // agent -> rank of its first deviation within its group
  std::map<int, int> group_dev_count;    // v -> first deviations seen so far
  {
    std::vector<bool> deviated(n, false);
    for (const IbrStep& step : trace.steps) {
      if (!deviated[step.agent]) {
        deviated[step.agent] = true;
        first_dev_seq[step.agent] = group_dev_count[s_star[step.agent]]++;
      }
    }
    for (const auto& [v, group] : st.initial_groups) {
      std::vector<int> stay;
      for (int i : group) {
        if (!deviated[i]) stay.push_back(i);
      }
      st.survivors[v] = stay;
    }
  }

  // "Guess the order" initialization: the q-th agent (0-based) to first
  // deviate from v gets join value |A_{s*}(v)| - q = |A^i_{s*}(v)|; agents
  // that never deviate take the remaining low values, by ascending index.
  st.lambda_init.assign(n, 0);
  st.first_deviation_group_size.assign(n, 0);
  for (const auto& [v, group] : st.initial_groups) {
    const int a = static_cast<int>(group.size());
    const int q = group_dev_count.count(v) ? group_dev_count[v] : 0;
    int next_low = a - q;
    for (int i : group) {
      if (first_dev_seq[i] >= 0) {
        st.lambda_init[i] = a - first_dev_seq[i];
        st.first_deviation_group_size[i] = st.lambda_init[i];
      } else {
        st.lambda_init[i] = next_low--;
      }
    }
  }

  // Pass 2: replay with relabeling and charging.
  st.label_of_agent.resize(n);
  std::iota(st.label_of_agent.begin(), st.label_of_agent.end(), 0);
  st.charge_of_label.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    st.join_occupancy[{i, s_star[i]}] = st.lambda_init[i];
  }

  StrategyProfile cur = s_star;
  std::vector<int> occupancy(inst.node_count, 0);
  for (int i = 0; i < n; ++i) ++occupancy[cur[i]];
  double cur_social = social_cost_value(inst, cur);
  const double start_social = cur_social;
  std::vector<bool> first_done(n, false);

  auto fail = [&](const std::string& msg) {
    audit.pass = false;
    audit.failure = msg;
    return audit;
  };

  for (size_t t = 0; t < trace.steps.size(); ++t) {
    const IbrStep& step = trace.steps[t];
    const int i = step.agent;
    const int v = step.from;
    const int v2 = step.to;
    if (cur[i] != v) return fail("trace inconsistent at step " + std::to_string(t));
    const int k = occupancy[v];

    // Join values of labels present at v must be exactly {1..k}.
    {
      std::vector<bool> seen(k + 1, false);
      for (int j = 0; j < n; ++j) {
        if (cur[j] != v) continue;
        auto it = st.join_occupancy.find({st.label_of_agent[j], v});
        if (it == st.join_occupancy.end() || it->second < 1 || it->second > k || seen[it->second]) {
          return fail("join-occupancy permutation invariant broken at step " + std::to_string(t));
        }
        seen[it->second] = true;
      }
    }

    if (st.join_occupancy.at({st.label_of_agent[i], v}) != k) {
      int partner = -1;
      for (int j = 0; j < n; ++j) {
        if (j == i || cur[j] != v) continue;
        if (st.join_occupancy.at({st.label_of_agent[j], v}) == k) {
          partner = j;
          break;
        }
      }
      if (partner < 0) return fail("relabel partner missing at step " + std::to_string(t));
      std::swap(st.label_of_agent[i], st.label_of_agent[partner]);
    }

    const int lambda_after = occupancy[v2] + 1;
    st.join_occupancy.erase({st.label_of_agent[i], v});
    --occupancy[v];
    ++occupancy[v2];
    cur[i] = v2;
    double new_social = social_cost_value(inst, cur);
    double delta = new_social - cur_social;
    cur_social = new_social;

    ChargingCaseRecord rec;
    rec.step = static_cast<int>(t);
    rec.agent = i;
    rec.charged_label = st.label_of_agent[i];
    const double beta_v = inst.facility_costs[v];
    const double beta_v2 = inst.facility_costs[v2];
    if (k > 1 && lambda_after > 1) {
      rec.case_tag = 1;
      rec.case_bound = beta_v / k - beta_v2 / lambda_after;
    } else if (k == 1 && lambda_after > 1) {
      rec.case_tag = 2;
      rec.case_bound = -beta_v2 / lambda_after;
    } else if (k > 1 && lambda_after == 1) {
      rec.case_tag = 3;
      rec.case_bound = beta_v / k;
    } else {
      rec.case_tag = 4;
      rec.case_bound = 0.0;
    }
    rec.delta_social = delta;
    rec.first_dev_bound = std::numeric_limits<double>::quiet_NaN();
    if (!first_done[i]) {
      first_done[i] = true;
      rec.first_dev_bound = beta_v / st.first_deviation_group_size[i];
      if (delta > rec.first_dev_bound + kCmpEps) {
        audit.records.push_back(rec);
        return fail("first-deviation charge exceeds beta_v/|A^i_{s*}(v)| at step " + std::to_string(t));
      }
    }
    if (delta > rec.case_bound + kCmpEps) {
      audit.records.push_back(rec);
      return fail("case " + std::to_string(rec.case_tag) + " bound violated at step " + std::to_string(t));
    }
    st.charge_of_label[st.label_of_agent[i]] += delta;
    st.join_occupancy[{st.label_of_agent[i], v2}] = lambda_after;
    audit.records.push_back(rec);
  }

  if (cur != trace.final_profile) return fail("trace final profile mismatch");

  audit.total_charge = 0.0;
  for (double c : st.charge_of_label) audit.total_charge += c;
  audit.cost_delta = cur_social - start_social;
  double scale = std::max({1.0, std::abs(audit.total_charge), std::abs(audit.cost_delta)});
  if (std::abs(audit.total_charge - audit.cost_delta) > 1e-9 * scale) {
    return fail("total recorded charges do not telescope to c(s) - c(s*)");
  }

  // Per-label lemma bound: each label was initialized at its own agent's s*
  // facility and can accumulate at most beta_{v0} / lambda_init.
  for (int label = 0; label < n; ++label) {
    double bound = inst.facility_costs[s_star[label]] / st.lambda_init[label];
    if (st.charge_of_label[label] > bound + 1e-9) {
      return fail("label " + std::to_string(label) + " charged beyond beta_v / lambda_init");
    }
  }

  audit.pass = true;
  return audit;
}

}  // namespace flg
