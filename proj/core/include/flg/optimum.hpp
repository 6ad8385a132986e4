#ifndef FLG_OPTIMUM_HPP
#define FLG_OPTIMUM_HPP

#include <optional>
#include <string>
#include <vector>

#include "flg/instance.hpp"

namespace flg {

struct OptimumSolution {
  std::vector<int> open_set;  // F, ascending
  StrategyProfile assignment; // agent -> nearest open facility
  double cost = 0.0;
};

// Exact social optimum by exhaustive scan over the 2^m - 1 nonempty facility
// sets; each agent is assigned to an open facility minimizing w_i * d (the
// centralized facility cost does not depend on loads, so nearest-open is
// optimal). Ties: lexicographically smallest open set, then lowest-index
// nearest facility. Throws if node_count exceeds the cap.
OptimumSolution social_optimum(const GameInstance& inst, int max_nodes = 20);

struct RatioReport {
  double opt_cost = 0.0;
  std::optional<double> min_eq_cost;
  std::optional<double> max_eq_cost;
  std::optional<double> pos;
  std::optional<double> poa;
  std::optional<double> spoa;
  double alpha = 1.0;
  int equilibrium_count = 0;
  // Set when a ratio is undefined (no equilibria, or opt_cost = 0 against a
  // nonzero equilibrium cost).
  std::string undefined_reason;
};

// Ratios of the given (caller-verified) equilibrium set against the social
// optimum. When is_strong, the max ratio is additionally reported as SPoA.
RatioReport ratios(const GameInstance& inst, const std::vector<StrategyProfile>& equilibria,
                   double alpha, bool is_strong = false);

// CSV row: opt,min_eq,max_eq,pos,poa,spoa,alpha,count (empty for undefined).
std::string ratio_report_csv(const RatioReport& rep);

}  // namespace flg

#endif
