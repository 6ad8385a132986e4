#include "flg/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

#include "flg/bounds.hpp"
#include "flg/dynamics.hpp"
#include "flg/equilibria.hpp"
#include "flg/optimum.hpp"

namespace flg {

namespace {

constexpr double kE = 2.718281828459045;

void oracle_require(bool ok, const std::string& what, std::vector<std::string>& notes) {
  if (!ok) throw std::runtime_error("generator oracle failed: " + what);
  notes.push_back(what + ": pass");
}

void finish(GeneratedInstance& gen, const std::string& name, const std::string& params) {
  gen.instance.annotations["generator"] = name;
  if (!params.empty()) gen.instance.annotations["params"] = params;
  gen.instance.annotations["s_star"] = format_profile(gen.s_star);
  std::string joined;
  for (size_t i = 0; i < gen.oracle_notes.size(); ++i) {
    if (i) joined += "; ";
    joined += gen.oracle_notes[i];
  }
  gen.instance.annotations["oracle"] = joined;
}

bool close_to(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

GeneratedInstance gen_two_node(int n, double beta) {
  if (n < 2) throw std::invalid_argument("gen_two_node: n must be >= 2");
  if (!(beta > 0.0)) throw std::invalid_argument("gen_two_node: beta must be > 0");
  GeneratedInstance gen;
  GameInstance& inst = gen.instance;
  inst.node_count = 2;
  inst.distances = {0.0, (n - 1) * beta / n, (n - 1) * beta / n, 0.0};
  inst.facility_costs = {beta, beta};
  inst.agents.assign(n, Agent{0, 1.0});
  inst.validate();
  validate_metric(inst); // two symmetric nodes are always metric
  gen.s_star.assign(n, 0);

  StrategyProfile far(n, 1);
  oracle_require(inst.metric_flag == MetricFlag::kAssertedMetric, "two-node-metric", gen.oracle_notes);
  oracle_require(is_pure_nash(inst, far, 1.0), "all-at-far-node-is-pne", gen.oracle_notes);
  oracle_require(close_to(social_cost_value(inst, far), n * beta), "pne-cost-n-beta", gen.oracle_notes);
  oracle_require(close_to(social_cost_value(inst, gen.s_star), beta), "opt-cost-beta", gen.oracle_notes);

  std::ostringstream params;
  params << "n=" << n << " beta=" << fmt_full(beta);
  finish(gen, "two-node", params.str());
  return gen;
}

GeneratedInstance gen_nonmetric_pos(int n, double eps, double delta) {
  if (n < 2) throw std::invalid_argument("gen_nonmetric_pos: n must be >= 2");
  if (!(delta > 0.0)) {
    throw std::invalid_argument("gen_nonmetric_pos: delta must be > 0 (agents are indifferent at "
                                "the cascade boundary otherwise)");
  }
  const double nd = n;
  if (!(delta < eps && eps < 1.0 / (nd * nd))) {
    throw std::invalid_argument("gen_nonmetric_pos: need 0 < delta < eps < 1/n^2");
  }
  if (!(delta < 1.0 / (nd * nd * (nd + 1.0)))) {
    throw std::invalid_argument("gen_nonmetric_pos: delta too large, d(u_n, v2) would go negative");
  }
  if (eps < 10 * kCmpEps || delta < 10 * kCmpEps) {
    throw std::invalid_argument("gen_nonmetric_pos: eps and delta must clear the comparison tolerance");
  }

  // Nodes: v1 = 0, v2 = 1, u_i = 1 + i.
  GeneratedInstance gen;
  GameInstance& inst = gen.instance;
  const int m = n + 2;
  inst.node_count = m;
  inst.distances.assign(static_cast<size_t>(m) * m, 10.0);
  for (int u = 0; u < m; ++u) inst.set_dist(u, u, 0.0);
  for (int i = 1; i <= n; ++i) {
    inst.set_dist(1 + i, 0, eps);
    inst.set_dist(1 + i, 1, 1.0 / i - 1.0 / (2 * n - i + 1) - i * delta);
  }
  // Facility cost 1 on the two facility nodes; filler cost 10 on the agent
  // home nodes. The home nodes sit close to v2 by construction (the same
  // symmetric edge that prices the cascade), so a unit opening cost there
  // would admit a cheap parasitic equilibrium with the v2 residents
  // gathering on a home node, undercutting the claimed minimum.
  inst.facility_costs.assign(m, 10.0);
  inst.facility_costs[0] = 1.0;
  inst.facility_costs[1] = 1.0;
  inst.agents.assign(n, Agent{1, 1.0}); // n agents residing on v2
  for (int i = 1; i <= n; ++i) inst.agents.push_back(Agent{1 + i, 1.0});
  inst.validate();
  validate_metric(inst);

  // Two-facility reference profile: residents on v2, u-agents on v1.
  gen.s_star.assign(n, 1);
  gen.s_star.insert(gen.s_star.end(), n, 0);

  oracle_require(inst.metric_flag == MetricFlag::kAssertedNonmetric, "nonmetric", gen.oracle_notes);

  DynamicsTrace trace = run_ibr(inst, gen.s_star, OrderPolicy::kRoundRobin, default_max_steps(inst));
  StrategyProfile all_v2(2 * n, 1);
  oracle_require(trace.converged && trace.final_profile == all_v2, "ibr-cascades-to-v2",
                 gen.oracle_notes);
  bool descending = trace.steps.size() == static_cast<size_t>(n);
  for (size_t t = 0; t < trace.steps.size() && descending; ++t) {
    descending = trace.steps[t].agent == 2 * n - 1 - static_cast<int>(t);
  }
  oracle_require(descending, "cascade-order-u_n-down-to-u_1", gen.oracle_notes);

  double expected = 1.0 + 2.0 * bounds::harmonic(n) - bounds::harmonic(2 * n) -
                    delta * n * (n + 1) / 2.0;
  oracle_require(close_to(social_cost_value(inst, all_v2), expected), "equilibrium-cost-closed-form",
                 gen.oracle_notes);

  std::uint64_t profiles = 1;
  for (int i = 0; i < 2 * n && profiles <= 2000000; ++i) profiles *= m;
  if (profiles <= 2000000) {
    std::vector<StrategyProfile> pne = enumerate_equilibria(inst, 1.0, EquilibriumKind::kNash);
    bool has_all_v2 = false, has_sstar = false;
    double min_cost = 0.0;
    for (size_t i = 0; i < pne.size(); ++i) {
      double c = social_cost_value(inst, pne[i]);
      if (i == 0 || c < min_cost) min_cost = c;
      if (pne[i] == all_v2) has_all_v2 = true;
      if (pne[i] == gen.s_star) has_sstar = true;
    }
    oracle_require(has_all_v2 && !has_sstar, "all-at-v2-pne-and-two-facility-profile-not",
                   gen.oracle_notes);
    double floor = 1.0 + 2.0 * bounds::harmonic(n) - bounds::harmonic(2 * n) - nd * nd * delta;
    oracle_require(!pne.empty() && min_cost >= floor - 1e-9, "min-equilibrium-cost-floor",
                   gen.oracle_notes);
  }

  std::ostringstream params;
  params << "n=" << n << " eps=" << fmt_full(eps) << " delta=" << fmt_full(delta);
  finish(gen, "nonmetric-pos", params.str());
  return gen;
}

GeneratedInstance gen_metric_pos(int n, double p_remain, double eps) {
  int k = static_cast<int>(std::llround(std::sqrt(static_cast<double>(n))));
  if (n < 4 || k * k != n) throw std::invalid_argument("gen_metric_pos: n must be a perfect square >= 4");
  if (!(p_remain > 0.0 && p_remain < 1.0)) {
    throw std::invalid_argument("gen_metric_pos: p_remain must be in (0,1)");
  }
  if (eps < 10 * kCmpEps) throw std::invalid_argument("gen_metric_pos: eps too small");
  int remaining = static_cast<int>(std::ceil(p_remain * k));
  remaining = std::max(1, std::min(remaining, k - 1));
  const int r = k - remaining;
  const double max_dx = 1.0 / (k - r + 1);

  // Nodes: hub v = 0; facilities v*_l = l for l = 1..k; per batch, r
  // individual home nodes plus one shared home for the remaining agents
  // (their specified distances coincide, so one node serves them all).
  EdgeListInstance part;
  const int m = 1 + k + k * (r + 1);
  part.node_count = m;
  part.facility_costs.assign(m, 1.0);
  part.agents.assign(n, Agent{0, 1.0}); // hub residents

  for (int l = 1; l <= k; ++l) {
    const long long lambda = static_cast<long long>(n) + static_cast<long long>(l - 1) * k;
    const int base = 1 + k + (l - 1) * (r + 1);
    for (int i = 1; i <= r; ++i) {
      double dx = 1.0 / (k - i + 1) - 1.0 / static_cast<double>(lambda + i) - eps;
      if (!(dx > 0.0)) {
        throw std::invalid_argument("gen_metric_pos: eps too large, increment schedule went negative");
      }
      double x = 0.5 * (max_dx - dx);
      const int home = base + i - 1;
      part.edges.push_back({home, l, x});
      part.edges.push_back({home, 0, x + dx});
      part.agents.push_back(Agent{home, 1.0});
    }
    const int shared = base + r;
    part.edges.push_back({shared, l, 0.0});
    part.edges.push_back({shared, 0, max_dx});
    for (int i = r + 1; i <= k; ++i) part.agents.push_back(Agent{shared, 1.0});
  }

  GeneratedInstance gen;
  gen.instance = metric_closure(part);
  GameInstance& inst = gen.instance;

  gen.s_star.assign(n, 0);
  for (int l = 1; l <= k; ++l) gen.s_star.insert(gen.s_star.end(), k, l);

  oracle_require(check_metric(inst).is_metric, "metric-after-closure", gen.oracle_notes);

  DynamicsTrace trace =
      run_ibr(inst, gen.s_star, OrderPolicy::kFacilityConsecutive, default_max_steps(inst));
  StrategyProfile all_hub(inst.num_agents(), 0);
  oracle_require(trace.converged && trace.final_profile == all_hub, "ibr-migrates-every-batch-to-hub",
                 gen.oracle_notes);

  double ratio = social_cost_value(inst, trace.final_profile) / social_cost_value(inst, gen.s_star);
  oracle_require(ratio <= 2.36 + 1e-9, "equilibrium-vs-start-ratio-below-2.36", gen.oracle_notes);

  bool batch_costs_match = true;
  for (int l = 1; l <= k && batch_costs_match; ++l) {
    const long long lambda = static_cast<long long>(n) + static_cast<long long>(l - 1) * k;
    bounds::BatchCosts bc = bounds::pos_lb_batch_costs(k, r, lambda, eps);
    double initial = inst.facility_costs[l];
    for (int i = 0; i < inst.num_agents(); ++i) {
      if (gen.s_star[i] == l) initial += inst.dist(inst.agents[i].home, l);
    }
    batch_costs_match = close_to(initial, bc.initial);
  }
  oracle_require(batch_costs_match, "batch-cost-matches-closed-form", gen.oracle_notes);

  std::ostringstream params;
  params << "n=" << n << " p_remain=" << fmt_full(p_remain) << " eps=" << fmt_full(eps)
         << " k=" << k << " r=" << r;
  finish(gen, "metric-pos", params.str());
  return gen;
}

GeneratedInstance gen_cycle6() {
  // u_1 = 0, v_1 = 1, u_2 = 2, v_2 = 3, u_3 = 4, v_3 = 5.
  EdgeListInstance part;
  part.node_count = 6;
  part.facility_costs.assign(6, 1.0);
  const double a = 7.0 / 18.0, b = 5.0 / 18.0;
  part.edges = {{0, 1, a}, {1, 2, b}, {2, 3, a}, {3, 4, b}, {4, 5, a}, {5, 0, b}};
  part.agents = {Agent{0, 1.0}, Agent{2, 1.0}, Agent{4, 1.0}};

  GeneratedInstance gen;
  gen.instance = metric_closure(part);
  GameInstance& inst = gen.instance;
  gen.s_star = {0, 2, 4}; // everyone opens at home

  oracle_require(check_metric(inst).is_metric, "metric-after-closure", gen.oracle_notes);
  oracle_require(inst.dist(0, 1) == a && inst.dist(2, 1) == b, "cycle-edges-preserved",
                 gen.oracle_notes);

  std::vector<StrategyProfile> strong =
      enumerate_equilibria(inst, 1.0, EquilibriumKind::kStrong, DeviationMode::kJoint);
  oracle_require(strong.empty(), "no-strong-equilibrium-among-216-profiles", gen.oracle_notes);
  std::vector<StrategyProfile> pne = enumerate_equilibria(inst, 1.0, EquilibriumKind::kNash);
  oracle_require(!pne.empty(), "pure-nash-equilibria-exist", gen.oracle_notes);

  // The quoted pair deviation: from (v_1, v_1, home), agents 3 and 1 move to
  // v_3 and land on costs 8/9 and 7/9.
  StrategyProfile q = {1, 1, 4};
  bool costs_ok = close_to(agent_cost(inst, q, 0), 8.0 / 9.0) &&
                  close_to(agent_cost(inst, q, 1), 7.0 / 9.0) &&
                  close_to(agent_cost(inst, q, 2), 1.0);
  StrategyProfile q2 = {5, 1, 5};
  costs_ok = costs_ok && close_to(agent_cost(inst, q2, 2), 8.0 / 9.0) &&
             close_to(agent_cost(inst, q2, 0), 7.0 / 9.0);
  oracle_require(costs_ok, "pair-deviation-costs-8/9-7/9", gen.oracle_notes);

  finish(gen, "cycle6", "");
  return gen;
}

GeneratedInstance gen_spoa_lb(int n, double alpha, double eps) {
  if (n < 2) throw std::invalid_argument("gen_spoa_lb: n must be >= 2");
  if (alpha < kE - 1e-12) throw std::invalid_argument("gen_spoa_lb: alpha must be >= e");
  if (!(eps > 0.0 && eps <= 1.0 / (static_cast<double>(n) * n))) {
    throw std::invalid_argument("gen_spoa_lb: need 0 < eps <= 1/n^2");
  }
  if (eps < 10 * kCmpEps) throw std::invalid_argument("gen_spoa_lb: eps too small");

  // Nodes: v_eq = 0, v_opt = 1, u_i = 1 + i.
  GeneratedInstance gen;
  GameInstance& inst = gen.instance;
  const int m = n + 2;
  inst.node_count = m;
  inst.distances.assign(static_cast<size_t>(m) * m, 10.0 * alpha);
  for (int u = 0; u < m; ++u) inst.set_dist(u, u, 0.0);
  for (int i = 1; i <= n; ++i) {
    double d_eq = alpha / i - 1.0 / n;
    if (d_eq < 0.0) throw std::invalid_argument("gen_spoa_lb: alpha/i - 1/n went negative");
    inst.set_dist(1 + i, 0, d_eq);
    inst.set_dist(1 + i, 1, eps);
  }
  inst.facility_costs.assign(m, 1.0);
  for (int i = 1; i <= n; ++i) inst.agents.push_back(Agent{1 + i, 1.0});
  inst.validate();
  validate_metric(inst);

  gen.s_star.assign(n, 0); // the expensive approximate strong equilibrium

  double cost_eq = social_cost_value(inst, gen.s_star);
  oracle_require(close_to(cost_eq, alpha * bounds::harmonic(n)), "equilibrium-cost-alpha-H(n)",
                 gen.oracle_notes);

  CoalitionSearchCaps caps;
  caps.max_n_joint = std::max(caps.max_n_joint, n);
  caps.max_m_joint = std::max(caps.max_m_joint, m);
  oracle_require(!find_coalition_deviation(inst, gen.s_star, alpha, DeviationMode::kJoint, caps),
                 "alpha-approximate-strong-by-joint-scan", gen.oracle_notes);

  double opt_cost = social_optimum(inst).cost;
  oracle_require(opt_cost <= 1.0 + n * eps + 1e-12, "optimum-at-most-1-plus-n-eps", gen.oracle_notes);

  std::ostringstream params;
  params << "n=" << n << " alpha=" << fmt_full(alpha) << " eps=" << fmt_full(eps);
  finish(gen, "spoa-lb", params.str());
  return gen;
}

GeneratedInstance generate_by_name(const std::string& name, const GeneratorParams& p) {
  if (name == "two-node") return gen_two_node(p.n, p.beta);
  if (name == "nonmetric-pos") return gen_nonmetric_pos(p.n, p.eps, p.delta);
  if (name == "metric-pos") return gen_metric_pos(p.n, p.p_remain, p.eps);
  if (name == "cycle6") return gen_cycle6();
  if (name == "spoa-lb") return gen_spoa_lb(p.n, p.alpha, p.eps);
  throw std::invalid_argument("unknown generator: " + name);
}

std::vector<std::string> generator_names() {
  return {"two-node", "nonmetric-pos", "metric-pos", "cycle6", "spoa-lb"};
}

}  // namespace flg
