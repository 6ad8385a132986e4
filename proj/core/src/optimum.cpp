#include "flg/optimum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flg {

namespace {

std::vector<int> mask_to_set(unsigned long long mask, int m) {
  std::vector<int> out;
  for (int v = 0; v < m; ++v) {
    if (mask & (1ull << v)) out.push_back(v);
  }
  return out;
}

// Ascending index-list comparison; shorter prefix wins.
bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

OptimumSolution social_optimum(const GameInstance& inst, int max_nodes) {
  const int m = inst.node_count;
  const int n = inst.num_agents();
  if (m > max_nodes) {
    throw std::invalid_argument("social_optimum: node count " + std::to_string(m) +
                                " exceeds cap " + std::to_string(max_nodes));
  }
  OptimumSolution best;
  bool have = false;
  for (unsigned long long mask = 1; mask < (1ull << m); ++mask) {
    std::vector<int> open = mask_to_set(mask, m);
    double cost = 0.0;
    for (int v : open) cost += inst.facility_costs[v];
    StrategyProfile assign(n);
    for (int i = 0; i < n; ++i) {
      const Agent& a = inst.agents[i];
      int best_v = open[0];
      double best_d = a.weight * inst.dist(a.home, open[0]);
      for (size_t j = 1; j < open.size(); ++j) {
        double d = a.weight * inst.dist(a.home, open[j]);
        if (d < best_d - kCmpEps) {
          best_d = d;
          best_v = open[j];
        }
      }
      assign[i] = best_v;
      cost += best_d;
    }
    if (!have || cost < best.cost - kCmpEps ||
        (cost <= best.cost + kCmpEps && lex_less(open, best.open_set))) {
      if (!have || cost < best.cost) best.cost = cost;
      best.open_set = std::move(open);
      best.assignment = std::move(assign);
      have = true;
    }
  }
  return best;
}

RatioReport ratios(const GameInstance& inst, const std::vector<StrategyProfile>& equilibria,
                   double alpha, bool is_strong) {
  RatioReport rep;
  rep.alpha = alpha;
  rep.equilibrium_count = static_cast<int>(equilibria.size());
  rep.opt_cost = social_optimum(inst).cost;
  if (equilibria.empty()) {
    rep.undefined_reason = "no equilibria";
    return rep;
  }
  double lo = 0.0, hi = 0.0;
  for (size_t i = 0; i < equilibria.size(); ++i) {
    double c = social_cost_value(inst, equilibria[i]);
    if (i == 0 || c < lo) lo = c;
    if (i == 0 || c > hi) hi = c;
  }
  rep.min_eq_cost = lo;
  rep.max_eq_cost = hi;
  if (rep.opt_cost <= 0.0) {
    if (hi > 0.0) {
      rep.undefined_reason = "opt cost is zero with nonzero equilibrium cost";
      return rep;
    }
    // 0/0: every profile is free; ratios are 1 by convention.
    rep.pos = rep.poa = 1.0;
    if (is_strong) rep.spoa = 1.0;
    return rep;
  }
  rep.pos = lo / rep.opt_cost;
  rep.poa = hi / rep.opt_cost;
  if (is_strong) rep.spoa = hi / rep.opt_cost;
  return rep;
}

std::string ratio_report_csv(const RatioReport& rep) {
  auto opt_field = [](const std::optional<double>& x) {
    return x ? fmt_full(*x) : std::string();
  };
  std::string row = fmt_full(rep.opt_cost);
  row += "," + opt_field(rep.min_eq_cost);
  row += "," + opt_field(rep.max_eq_cost);
  row += "," + opt_field(rep.pos);
  row += "," + opt_field(rep.poa);
  row += "," + opt_field(rep.spoa);
  row += "," + fmt_full(rep.alpha);
  row += "," + std::to_string(rep.equilibrium_count);
  return row;
}

}  // namespace flg
