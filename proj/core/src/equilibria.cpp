#include "flg/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "flg/bounds.hpp"

namespace flg {

namespace {

std::vector<double> all_loads(const GameInstance& inst, const StrategyProfile& s) {
  std::vector<double> loads(inst.node_count, 0.0);
  for (int i = 0; i < inst.num_agents(); ++i) loads[s[i]] += inst.agents[i].weight;
  return loads;
}

std::vector<double> all_costs(const GameInstance& inst, const StrategyProfile& s) {
  std::vector<double> loads = all_loads(inst, s);
  std::vector<double> c(inst.num_agents());
  for (int i = 0; i < inst.num_agents(); ++i) {
    const Agent& a = inst.agents[i];
    c[i] = a.weight * inst.dist(a.home, s[i]) + a.weight * inst.facility_costs[s[i]] / loads[s[i]];
  }
  return c;
}

bool is_unweighted(const GameInstance& inst) {
  for (const Agent& a : inst.agents) {
    if (a.weight != 1.0) return false;
  }
  return true;
}

bool nash_with_buffers(const GameInstance& inst, const StrategyProfile& s, double alpha,
                       std::vector<double>& loads) {
  loads.assign(inst.node_count, 0.0);
  for (int i = 0; i < inst.num_agents(); ++i) loads[s[i]] += inst.agents[i].weight;
  for (int i = 0; i < inst.num_agents(); ++i) {
    const Agent& a = inst.agents[i];
    double cur = a.weight * inst.dist(a.home, s[i]) + a.weight * inst.facility_costs[s[i]] / loads[s[i]];
    for (int v = 0; v < inst.node_count; ++v) {
      if (v == s[i]) continue;
      double cand = a.weight * inst.dist(a.home, v) +
                    a.weight * inst.facility_costs[v] / (loads[v] + a.weight);
      if (improves_by_factor(cur, cand, alpha)) return false;
    }
  }
  return true;
}

// Enumerates coalition deviations in the deterministic order (size, then
// lexicographic coalition, then lexicographic targets) and calls visit for
// each improving move. visit returning true stops the scan. Per-member
// target lists are pre-pruned with a load lower bound (the share can never
// be smaller than with every agent on the node), which cannot discard an
// improving move.
struct DeviationScanner {
  const GameInstance& inst;
  const StrategyProfile& s;
  double alpha;
  DeviationMode mode;

  std::vector<double> costs;
  std::vector<double> loads;
  double total_weight = 0.0;
  std::vector<std::vector<int>> viable; // per agent, ascending target nodes

  DeviationScanner(const GameInstance& inst_, const StrategyProfile& s_, double alpha_,
                   DeviationMode mode_)
      : inst(inst_), s(s_), alpha(alpha_), mode(mode_) {
    costs = all_costs(inst, s);
    loads = all_loads(inst, s);
    total_weight = inst.total_weight();
    viable.resize(inst.num_agents());
    for (int i = 0; i < inst.num_agents(); ++i) {
      const Agent& a = inst.agents[i];
      for (int v = 0; v < inst.node_count; ++v) {
        if (v == s[i]) continue;
        double floor_cost =
            a.weight * inst.dist(a.home, v) + a.weight * inst.facility_costs[v] / total_weight;
        if (improves_by_factor(costs[i], floor_cost, alpha)) viable[i].push_back(v);
      }
    }
  }

  template <typename Visit>
  bool scan(Visit&& visit) {
    const int n = inst.num_agents();
    std::vector<int> coalition;
    for (int size = 1; size <= n; ++size) {
      coalition.assign(size, 0);
      std::iota(coalition.begin(), coalition.end(), 0);
      if (size > n) break;
      while (true) {
        if (scan_targets(coalition, visit)) return true;
        // next combination in lexicographic order
        int pos = size - 1;
        while (pos >= 0 && coalition[pos] == n - size + pos) --pos;
        if (pos < 0) break;
        ++coalition[pos];
        for (int q = pos + 1; q < size; ++q) coalition[q] = coalition[q - 1] + 1;
      }
    }
    return false;
  }

  template <typename Visit>
  bool scan_targets(const std::vector<int>& coalition, Visit&& visit) {
    const int size = static_cast<int>(coalition.size());
    if (mode == DeviationMode::kSingleTarget) {
      for (int v = 0; v < inst.node_count; ++v) {
        bool ok = true;
        for (int i : coalition) {
          if (s[i] == v) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        std::vector<int> targets(size, v);
        if (try_move(coalition, targets, visit)) return true;
      }
      return false;
    }
    for (int i : coalition) {
      if (viable[i].empty()) return false;
    }
    std::vector<int> idx(size, 0);
    while (true) {
      std::vector<int> targets(size);
      for (int q = 0; q < size; ++q) targets[q] = viable[coalition[q]][idx[q]];
      if (try_move(coalition, targets, visit)) return true;
      int pos = size - 1;
      while (pos >= 0 && idx[pos] + 1 == static_cast<int>(viable[coalition[pos]].size())) {
        idx[pos] = 0;
        --pos;
      }
      if (pos < 0) break;
      ++idx[pos];
    }
    return false;
  }

  template <typename Visit>
  bool try_move(const std::vector<int>& coalition, const std::vector<int>& targets, Visit&& visit) {
    const int size = static_cast<int>(coalition.size());
    std::vector<double> new_loads = loads;
    for (int q = 0; q < size; ++q) {
      new_loads[s[coalition[q]]] -= inst.agents[coalition[q]].weight;
      new_loads[targets[q]] += inst.agents[coalition[q]].weight;
    }
    std::vector<double> factors(size);
    for (int q = 0; q < size; ++q) {
      const int i = coalition[q];
      const Agent& a = inst.agents[i];
      double cand = a.weight * inst.dist(a.home, targets[q]) +
                    a.weight * inst.facility_costs[targets[q]] / new_loads[targets[q]];
      if (!improves_by_factor(costs[i], cand, alpha)) return false;
      factors[q] = costs[i] / cand;
    }
    DeviationMove move;
    move.coalition = coalition;
    move.targets = targets;
    move.mode = mode;
    move.improvement_factors = std::move(factors);
    return visit(std::move(move));
  }
};

void check_caps(const GameInstance& inst, DeviationMode mode, const CoalitionSearchCaps& caps) {
  const int n = inst.num_agents();
  const int m = inst.node_count;
  if (mode == DeviationMode::kJoint) {
    if (n > caps.max_n_joint || m > caps.max_m_joint) {
      throw std::invalid_argument("coalition search cap exceeded (joint mode): n=" +
                                  std::to_string(n) + " m=" + std::to_string(m));
    }
  } else if (n > caps.max_n_single) {
    throw std::invalid_argument("coalition search cap exceeded (single-target mode): n=" +
                                std::to_string(n));
  }
}

}  // namespace

bool is_pure_nash(const GameInstance& inst, const StrategyProfile& s, double alpha) {
  validate_profile(inst, s);
  if (alpha < 1.0) throw std::invalid_argument("is_pure_nash: alpha must be >= 1");
  std::vector<double> loads;
  return nash_with_buffers(inst, s, alpha, loads);
}

std::optional<DeviationMove> find_coalition_deviation(const GameInstance& inst,
                                                      const StrategyProfile& s, double alpha,
                                                      DeviationMode mode,
                                                      const CoalitionSearchCaps& caps) {
  validate_profile(inst, s);
  if (alpha < 1.0) throw std::invalid_argument("find_coalition_deviation: alpha must be >= 1");
  check_caps(inst, mode, caps);
  std::optional<DeviationMove> found;
  DeviationScanner scanner(inst, s, alpha, mode);
  scanner.scan([&](DeviationMove&& move) {
    found = std::move(move);
    return true;
  });
  return found;
}

std::vector<StrategyProfile> enumerate_equilibria(const GameInstance& inst, double alpha,
                                                  EquilibriumKind kind, DeviationMode mode,
                                                  const EnumerationCaps& caps) {
  if (alpha < 1.0) throw std::invalid_argument("enumerate_equilibria: alpha must be >= 1");
  const int n = inst.num_agents();
  const int m = inst.node_count;
  std::uint64_t total = 1;
  const std::uint64_t cap =
      (kind == EquilibriumKind::kNash) ? caps.max_profiles_nash : caps.max_profiles_strong;
  for (int i = 0; i < n; ++i) {
    if (total > cap / m + 1) {
      throw std::invalid_argument("enumerate_equilibria: profile space exceeds cap");
    }
    total *= m;
  }
  if (total > cap) throw std::invalid_argument("enumerate_equilibria: profile space exceeds cap");
  if (kind == EquilibriumKind::kStrong) check_caps(inst, mode, caps.coalition);

  auto scan_range = [&](std::uint64_t begin, std::uint64_t end, std::vector<StrategyProfile>& out) {
    StrategyProfile s(n);
    std::vector<double> loads;
    std::uint64_t idx = begin;
    // decode begin: agent 0 is the most significant digit
    {
      std::uint64_t rem = begin;
      for (int i = n - 1; i >= 0; --i) {
        s[i] = static_cast<int>(rem % m);
        rem /= m;
      }
    }
    for (; idx < end; ++idx) {
      if (nash_with_buffers(inst, s, alpha, loads)) {
        bool accept = true;
        if (kind == EquilibriumKind::kStrong) {
          DeviationScanner scanner(inst, s, alpha, mode);
          accept = !scanner.scan([](DeviationMove&&) { return true; });
        }
        if (accept) out.push_back(s);
      }
      // odometer increment
      for (int i = n - 1; i >= 0; --i) {
        if (++s[i] < m) break;
        s[i] = 0;
      }
    }
  };

  int jobs = std::max(1, caps.jobs);
  if (jobs == 1 || total < 4096) {
    std::vector<StrategyProfile> out;
    scan_range(0, total, out);
    return out;
  }
  std::vector<std::vector<StrategyProfile>> parts(jobs);
  std::vector<std::thread> threads;
  for (int j = 0; j < jobs; ++j) {
    std::uint64_t begin = total * j / jobs;
    std::uint64_t end = total * (j + 1) / jobs;
    threads.emplace_back([&, j, begin, end] { scan_range(begin, end, parts[j]); });
  }
  for (auto& t : threads) t.join();
  std::vector<StrategyProfile> out;
  for (auto& p : parts) {
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

CoalitionDynamicsResult coalition_dynamics(const GameInstance& inst, const StrategyProfile& start,
                                           double alpha, DeviationMode mode, int max_steps,
                                           std::optional<std::uint64_t> random_seed,
                                           const CoalitionSearchCaps& caps) {
  validate_profile(inst, start);
  if (max_steps < 1) throw std::invalid_argument("coalition_dynamics: max_steps must be >= 1");
  check_caps(inst, mode, caps);

  std::mt19937_64 rng(random_seed.value_or(0));
  CoalitionDynamicsResult res;
  StrategyProfile cur = start;
  std::map<StrategyProfile, int> seen;
  std::vector<StrategyProfile> trajectory{cur};
  std::vector<DeviationMove> moves;
  seen[cur] = 0;

  for (int step = 0; step < max_steps; ++step) {
    std::optional<DeviationMove> move;
    DeviationScanner scanner(inst, cur, alpha, mode);
    if (!random_seed) {
      scanner.scan([&](DeviationMove&& mv) {
        move = std::move(mv);
        return true;
      });
    } else {
      std::uint64_t count = 0;
      scanner.scan([&](DeviationMove&&) {
        ++count;
        return false;
      });
      if (count > 0) {
        std::uint64_t pick = rng() % count;
        std::uint64_t at = 0;
        DeviationScanner second(inst, cur, alpha, mode);
        second.scan([&](DeviationMove&& mv) {
          if (at++ == pick) {
            move = std::move(mv);
            return true;
          }
          return false;
        });
      }
    }
    if (!move) {
      res.outcome = CoalitionDynamicsResult::Outcome::kEquilibrium;
      res.equilibrium = cur;
      res.steps_taken = step;
      return res;
    }
    for (size_t q = 0; q < move->coalition.size(); ++q) cur[move->coalition[q]] = move->targets[q];
    moves.push_back(std::move(*move));
    auto it = seen.find(cur);
    if (it != seen.end()) {
      res.outcome = CoalitionDynamicsResult::Outcome::kCycle;
      res.steps_taken = step + 1;
      int at = it->second;
      res.cycle.profiles.assign(trajectory.begin() + at, trajectory.end());
      res.cycle.profiles.push_back(cur);
      res.cycle.moves.assign(moves.begin() + at, moves.end());
      return res;
    }
    seen[cur] = static_cast<int>(trajectory.size());
    trajectory.push_back(cur);
  }
  res.outcome = CoalitionDynamicsResult::Outcome::kCapExceeded;
  res.steps_taken = max_steps;
  return res;
}

DamageReport damage_accounting(const GameInstance& inst, CycleRecord& cycle) {
  const size_t k = cycle.profiles.size();
  if (k < 2 || cycle.profiles.front() != cycle.profiles.back() || cycle.moves.size() != k - 1) {
    throw std::invalid_argument("damage_accounting: not a closed cycle record");
  }
  const int n = inst.num_agents();
  DamageReport rep;
  double telescope_log = 0.0;
  for (size_t j = 0; j + 1 < k; ++j) {
    std::vector<double> before = all_costs(inst, cycle.profiles[j]);
    std::vector<double> after = all_costs(inst, cycle.profiles[j + 1]);
    for (int i = 0; i < n; ++i) {
      if (before[i] <= 0.0 || after[i] <= 0.0) {
        throw std::invalid_argument("damage_accounting: zero cost encountered");
      }
    }
    std::vector<bool> in_coalition(n, false);
    double coalition_weight = 0.0;
    for (int i : cycle.moves[j].coalition) {
      in_coalition[i] = true;
      coalition_weight += inst.agents[i].weight;
    }
    double impr_log = 0.0, dam_log = 0.0;
    for (int i = 0; i < n; ++i) {
      double w = inst.agents[i].weight;
      if (in_coalition[i]) {
        impr_log += w * (std::log(before[i]) - std::log(after[i]));
      } else {
        dam_log += w * (std::log(after[i]) - std::log(before[i]));
      }
    }
    rep.impr_values.push_back(std::exp(impr_log));
    rep.dam_values.push_back(std::exp(dam_log));
    rep.dam_max = std::max(rep.dam_max, std::exp(dam_log / coalition_weight));
    telescope_log += impr_log - dam_log;
  }
  rep.telescoping_product = std::exp(telescope_log);
  rep.telescoping_ok = std::abs(rep.telescoping_product - 1.0) <= 1e-6;
  cycle.impr_values = rep.impr_values;
  cycle.dam_values = rep.dam_values;
  cycle.dam_max = rep.dam_max;
  return rep;
}

SpoaCertificate spoa_peeling_certificate(const GameInstance& inst, const StrategyProfile& s,
                                         const StrategyProfile& s_opt, double alpha) {
  validate_profile(inst, s);
  validate_profile(inst, s_opt);
  if (alpha < 1.0) throw std::invalid_argument("spoa_peeling_certificate: alpha must be >= 1");

  SpoaCertificate cert;
  cert.alpha = alpha;
  cert.pass = true;
  std::vector<double> costs_s = all_costs(inst, s);
  std::vector<double> costs_opt = all_costs(inst, s_opt);
  std::vector<double> loads_s = all_loads(inst, s);

  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < inst.num_agents(); ++i) groups[s_opt[i]].push_back(i);

  for (const auto& [v, group] : groups) {
    FacilityPeel peel;
    peel.facility = v;
    peel.members_opt = group;
    for (int i : group) {
      if (s[i] == v) {
        peel.members_stay.push_back(i);
      } else {
        peel.misconnected.push_back(i);
      }
    }
    const auto& I = peel.misconnected;
    const int q = static_cast<int>(I.size());
    peel.peel_order.assign(q, -1);
    peel.witness_slack.assign(q, 0.0);

    std::vector<int> remaining = I;
    double w_remaining = 0.0;
    for (int i : remaining) w_remaining += inst.agents[i].weight;
    const double beta_v = inst.facility_costs[v];
    const double load_v = loads_s[v];

    for (int pos = q; pos >= 1; --pos) {
      int witness = -1;
      double slack = 0.0;
      for (int l : remaining) {
        const Agent& a = inst.agents[l];
        double cand = a.weight * inst.dist(a.home, v) + a.weight * beta_v / (w_remaining + load_v);
        if (!improves_by_factor(costs_s[l], cand, alpha)) {
          witness = l;
          slack = alpha * cand - costs_s[l];
          break;
        }
      }
      if (witness < 0) {
        peel.pass = false;
        cert.pass = false;
        cert.failure = "no unwilling witness at facility " + std::to_string(v) +
                       ", subset size " + std::to_string(pos) +
                       ": input is not alpha-approximate strong";
        cert.facilities.push_back(std::move(peel));
        return cert;
      }
      peel.peel_order[pos - 1] = witness;
      peel.witness_slack[pos - 1] = slack;
      remaining.erase(std::find(remaining.begin(), remaining.end(), witness));
      w_remaining -= inst.agents[witness].weight;
    }

    // Weighted-harmonic factor over the peeling prefixes I^1 c ... c I^q.
    double factor = 0.0;
    double prefix_weight = 0.0;
    double lhs = 0.0, c_i_opt = 0.0;
    for (int pos = 1; pos <= q; ++pos) {
      int i = peel.peel_order[pos - 1];
      prefix_weight += inst.agents[i].weight;
      factor += inst.agents[i].weight / prefix_weight;
    }
    for (int i : I) {
      lhs += costs_s[i];
      c_i_opt += costs_opt[i];
    }
    peel.lhs = lhs;
    peel.bound = alpha * factor * c_i_opt;
    peel.pass = lhs <= peel.bound + kCmpEps * std::max(1.0, std::abs(peel.bound));
    if (!peel.pass) {
      cert.pass = false;
      if (cert.failure.empty()) {
        cert.failure = "weighted-harmonic bound violated at facility " + std::to_string(v);
      }
    }
    cert.facilities.push_back(std::move(peel));
  }
  return cert;
}

MetricSpoaAudit metric_spoa_audit(const GameInstance& inst, const StrategyProfile& s,
                                  const StrategyProfile& s_opt, double alpha) {
  validate_profile(inst, s);
  validate_profile(inst, s_opt);
  if (alpha < 1.0) throw std::invalid_argument("metric_spoa_audit: alpha must be >= 1");
  if (!is_unweighted(inst)) {
    throw std::invalid_argument("metric_spoa_audit: unit weights required");
  }
  if (!check_metric(inst).is_metric) {
    throw ValidationError("metric_spoa_audit: instance is not metric");
  }

  MetricSpoaAudit audit;
  audit.alpha = alpha;
  audit.pass = true;
  std::vector<double> costs_s = all_costs(inst, s);

  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < inst.num_agents(); ++i) groups[s_opt[i]].push_back(i);

  auto record_fail = [&](MetricFacilityAudit& fa, const std::string& why) {
    fa.pass = false;
    audit.pass = false;
    if (audit.failure.empty()) audit.failure = why;
  };

  for (const auto& [v, group] : groups) {
    MetricFacilityAudit fa;
    fa.facility = v;
    fa.members_opt = group;
    for (int i : group) {
      (s[i] == v ? fa.members_stay : fa.misconnected).push_back(i);
    }
    for (int j = 0; j < inst.num_agents(); ++j) {
      if (s[j] == v && s_opt[j] != v) fa.outsiders.push_back(j);
    }
    const double beta_v = inst.facility_costs[v];
    const int a_count = static_cast<int>(group.size());
    const int stay_count = static_cast<int>(fa.members_stay.size());
    const auto& I = fa.misconnected;
    const int i_count = static_cast<int>(I.size());

    auto x_of = [&](int agent) { return inst.dist(inst.agents[agent].home, v); };
    double c_v_star = beta_v;
    double lhs = 0.0;
    for (int i : group) {
      c_v_star += x_of(i);
      lhs += costs_s[i];
    }
    if (c_v_star <= 0.0) {
      fa.ratio = (lhs <= kCmpEps) ? 1.0 : std::numeric_limits<double>::infinity();
      if (lhs > kCmpEps) record_fail(fa, "zero-cost optimum facility with nonzero equilibrium cost");
      audit.max_ratio = std::max(audit.max_ratio, fa.ratio);
      audit.facilities.push_back(std::move(fa));
      continue;
    }
    fa.ratio = lhs / c_v_star;
    audit.max_ratio = std::max(audit.max_ratio, fa.ratio);

    // Willingness to deviate to v with a coalition of the given size, under
    // s_{-R}: the share counts the coalition plus A_s(v), excluding R.
    auto willing = [&](int agent, int coalition_size) {
      double cand = x_of(agent) + beta_v / (coalition_size + stay_count);
      return improves_by_factor(costs_s[agent], cand, alpha);
    };

    bool any_willing_full = false;
    for (int l : I) {
      if (willing(l, i_count)) {
        any_willing_full = true;
        break;
      }
    }

    if (!any_willing_full) {
      fa.tag = MetricFacilityAudit::Case::kSimple;
      fa.simple.value = (1.0 + alpha) - fa.ratio;
      fa.simple.pass = fa.simple.value >= -kCmpEps;
      if (!fa.simple.pass) record_fail(fa, "simple-case (1+alpha) bound violated");
      audit.facilities.push_back(std::move(fa));
      continue;
    }

    fa.tag = MetricFacilityAudit::Case::kMinimalSubset;
    int k0 = i_count;
    for (int sigma = 1; sigma <= i_count; ++sigma) {
      bool any = false;
      for (int l : I) {
        if (willing(l, sigma)) {
          any = true;
          break;
        }
      }
      if (any) {
        k0 = sigma;
        break;
      }
    }
    fa.min_subset_size = k0;
    for (int l : I) {
      if (willing(l, k0) && fa.unstable < 0) fa.unstable = l;
    }

    // All size-k0 subsets containing a willing agent are inclusion-minimal
    // (no smaller subset contains one, by choice of k0).
    {
      std::vector<int> comb(k0);
      std::iota(comb.begin(), comb.end(), 0);
      while (true) {
        bool any = false;
        for (int idx : comb) {
          if (willing(I[idx], k0)) {
            any = true;
            break;
          }
        }
        if (any) {
          std::vector<int> subset;
          for (int idx : comb) subset.push_back(I[idx]);
          fa.minimal_subsets.push_back(std::move(subset));
        }
        int pos = k0 - 1;
        while (pos >= 0 && comb[pos] == i_count - k0 + pos) --pos;
        if (pos < 0) break;
        ++comb[pos];
        for (int q2 = pos + 1; q2 < k0; ++q2) comb[q2] = comb[q2 - 1] + 1;
      }
      if (!fa.minimal_subsets.empty()) fa.lex_first_subset = fa.minimal_subsets.front();
    }

    const int r = k0 + stay_count;
    fa.settled_size = r;
    if (r - 1 <= 0) {
      record_fail(fa, "degenerate minimal subset (r = 1 with no staying agents): "
                      "a lone willing agent contradicts alpha-strongness");
      audit.facilities.push_back(std::move(fa));
      continue;
    }

    // The proof's exchange step: members other than the unstable agent fill
    // the superset slots sigma = k0+1 .. |I| (slot sigma requires not being
    // willing at sigma); the rest complete I^0. Thresholds are monotone, so
    // the greedy descending assignment is exact.
    struct Member {
      int agent;
      int tau; // largest coalition size at which the member is not willing
    };
    std::vector<Member> others;
    for (int l : I) {
      if (l == fa.unstable) continue;
      int tau = i_count;
      for (int sigma = k0; sigma <= i_count; ++sigma) {
        if (willing(l, sigma)) {
          tau = sigma - 1;
          break;
        }
      }
      others.push_back({l, tau});
    }
    std::sort(others.begin(), others.end(), [](const Member& a, const Member& b) {
      if (a.tau != b.tau) return a.tau > b.tau;
      return a.agent < b.agent;
    });
    const int j_count = i_count - k0;
    fa.j_order.assign(j_count, -1);
    bool matched = true;
    for (int t = 0; t < j_count; ++t) {
      int slot_sigma = i_count - t;
      const Member& mem = others[t];
      if (mem.tau < slot_sigma) {
        matched = false;
        break;
      }
      fa.j_order[slot_sigma - k0 - 1] = mem.agent;
    }
    if (!matched) {
      record_fail(fa, "superset witnesses cannot be ordered: input is not alpha-approximate strong");
      audit.facilities.push_back(std::move(fa));
      continue;
    }
    fa.disagreeing.push_back(fa.unstable);
    for (size_t t = j_count; t < others.size(); ++t) fa.disagreeing.push_back(others[t].agent);
    std::sort(fa.disagreeing.begin(), fa.disagreeing.end());

    // (9): the unstable agent strictly prefers joining v with I^0 under s_{-R}.
    fa.ineq_willing.value = costs_s[fa.unstable] - alpha * (x_of(fa.unstable) + beta_v / r);
    fa.ineq_willing.pass = fa.ineq_willing.value > kCmpEps;
    if (!fa.ineq_willing.pass) record_fail(fa, "unstable-agent strict bound failed");

    // (10): by minimality, every member of I^0 is unwilling at size k0 - 1.
    double sum_c_i0 = 0.0, sum_x_i0 = 0.0;
    for (int l : fa.disagreeing) {
      double bound = alpha * (x_of(l) + beta_v / (r - 1));
      fa.minimality_slack.push_back(bound - costs_s[l]);
      if (bound - costs_s[l] < -kCmpEps) record_fail(fa, "minimality bound failed for a member of I^0");
      sum_c_i0 += costs_s[l];
      sum_x_i0 += x_of(l);
    }
    fa.minimality_sum.value = 2.0 * alpha * (beta_v + sum_x_i0) - sum_c_i0;
    fa.minimality_sum.pass = fa.minimality_sum.value >= -kCmpEps;
    if (!fa.minimality_sum.pass) record_fail(fa, "summed I^0 bound failed");

    // (11): superset chain for J, |R| omitted in the asserted variant.
    double sum_c_j = 0.0, sum_x_j = 0.0;
    const int r_count = static_cast<int>(fa.outsiders.size());
    for (int t = 1; t <= j_count; ++t) {
      int j = fa.j_order[t - 1];
      double bound = alpha * (x_of(j) + beta_v / (r + t));
      double bound_r = alpha * (x_of(j) + beta_v / (r + t + r_count));
      fa.superset_slack.push_back(bound - costs_s[j]);
      fa.superset_slack_with_r.push_back(bound_r - costs_s[j]);
      if (bound - costs_s[j] < -kCmpEps) record_fail(fa, "superset witness bound failed");
      sum_c_j += costs_s[j];
      sum_x_j += x_of(j);
    }
    const double h_a = bounds::harmonic(a_count);
    const double h_r = bounds::harmonic(r);
    fa.superset_sum.value = alpha * (sum_x_j + beta_v * (h_a - h_r)) - sum_c_j;
    fa.superset_sum.pass = fa.superset_sum.value >= -kCmpEps;
    if (!fa.superset_sum.pass) record_fail(fa, "summed J bound failed");

    // (12): lower bound on the optimum connection cost of J. The closed form
    // presumes ceil(alpha r) <= |A_{s*}(v)|; otherwise every per-term bound
    // is vacuous and the sum is bounded below by zero.
    long long ar = static_cast<long long>(std::ceil(alpha * r - 1e-12));
    double lb = 0.0;
    if (ar <= a_count) {
      lb = (beta_v / (1.0 + alpha)) *
           ((static_cast<double>(a_count) - static_cast<double>(ar)) / r -
            alpha * (h_a - bounds::harmonic(ar)));
    }
    fa.connection_lb.value = sum_x_j - lb;
    fa.connection_lb.pass = fa.connection_lb.value >= -kCmpEps;
    if (!fa.connection_lb.pass) record_fail(fa, "connection-cost lower bound failed");

    // (14): assembled per-facility ratio bound with the attained sum_x_j.
    double assembled = 1.0 + 2.0 * alpha + 2.0 * alpha * beta_v * (h_a - h_r) / (beta_v + sum_x_j);
    fa.assembled.value = assembled - fa.ratio;
    fa.assembled.pass = fa.assembled.value >= -kCmpEps;
    if (!fa.assembled.pass) record_fail(fa, "assembled per-facility ratio bound failed");

    audit.facilities.push_back(std::move(fa));
  }
  return audit;
}

namespace {

nlohmann::json slack_json(const Slack& s) {
  return {{"value", s.value}, {"pass", s.pass}};
}

}  // namespace

std::string to_json_string(const SpoaCertificate& cert) {
  nlohmann::json j;
  j["alpha"] = cert.alpha;
  j["pass"] = cert.pass;
  j["failure"] = cert.failure;
  j["facilities"] = nlohmann::json::array();
  for (const FacilityPeel& p : cert.facilities) {
    j["facilities"].push_back({{"facility", p.facility},
                               {"members_opt", p.members_opt},
                               {"members_stay", p.members_stay},
                               {"misconnected", p.misconnected},
                               {"peel_order", p.peel_order},
                               {"witness_slack", p.witness_slack},
                               {"lhs", p.lhs},
                               {"bound", p.bound},
                               {"pass", p.pass}});
  }
  return j.dump(2);
}

std::string to_json_string(const MetricSpoaAudit& audit) {
  nlohmann::json j;
  j["alpha"] = audit.alpha;
  j["pass"] = audit.pass;
  j["failure"] = audit.failure;
  j["max_ratio"] = audit.max_ratio;
  j["facilities"] = nlohmann::json::array();
  for (const MetricFacilityAudit& f : audit.facilities) {
    nlohmann::json jf = {
        {"facility", f.facility},
        {"members_opt", f.members_opt},
        {"members_stay", f.members_stay},
        {"misconnected", f.misconnected},
        {"outsiders", f.outsiders},
        {"ratio", f.ratio},
        {"case", f.tag == MetricFacilityAudit::Case::kSimple ? "simple" : "minimal-subset"},
        {"pass", f.pass},
    };
    if (f.tag == MetricFacilityAudit::Case::kSimple) {
      jf["simple"] = slack_json(f.simple);
    } else {
      jf["min_subset_size"] = f.min_subset_size;
      jf["settled_size"] = f.settled_size;
      jf["minimal_subsets"] = f.minimal_subsets;
      jf["lex_first_subset"] = f.lex_first_subset;
      jf["disagreeing"] = f.disagreeing;
      jf["unstable"] = f.unstable;
      jf["j_order"] = f.j_order;
      jf["ineq_willing"] = slack_json(f.ineq_willing);
      jf["minimality_slack"] = f.minimality_slack;
      jf["minimality_sum"] = slack_json(f.minimality_sum);
      jf["superset_slack"] = f.superset_slack;
      jf["superset_slack_with_r"] = f.superset_slack_with_r;
      jf["superset_sum"] = slack_json(f.superset_sum);
      jf["connection_lb"] = slack_json(f.connection_lb);
      jf["assembled"] = slack_json(f.assembled);
    }
    j["facilities"].push_back(std::move(jf));
  }
  return j.dump(2);
}

}  // namespace flg
