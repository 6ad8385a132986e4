#ifndef FLG_CONSTRUCTIONS_HPP
#define FLG_CONSTRUCTIONS_HPP

#include <string>
#include <vector>

#include "flg/instance.hpp"

namespace flg {

// A generated worst-case instance together with the construction's reference
// profile (the configuration the claim is stated from) and the oracle
// verdicts that were verified before emitting. Generators are deterministic
// in their parameters and throw if any oracle check fails.
struct GeneratedInstance {
  GameInstance instance;
  StrategyProfile s_star;
  std::vector<std::string> oracle_notes;
};

// Two nodes at distance (n-1) beta / n, n unit agents on the first; the
// all-at-the-far-node profile is a pure Nash equilibrium of cost n beta
// while the optimum costs beta.
GeneratedInstance gen_two_node(int n, double beta);

// Non-metric PoS lower bound: n agents on a hub node v2 plus one agent on
// each u_i, with d(u_i, v2) = 1/i - 1/(2n-i+1) - i delta and d(u_i, v1) =
// eps. Best responses starting from the two-facility profile cascade every
// u-agent to v2, for an equilibrium connection total of 2H(n) - H(2n).
GeneratedInstance gen_nonmetric_pos(int n, double eps, double delta);

// Metric PoS lower bound (sqrt(n) batches of sqrt(n) agents around
// dedicated facilities plus n agents on a hub): distances follow the
// increment schedule dx_i = 1/(k-i+1) - 1/(lambda+i) - eps for the first r
// agents of a batch and 1/(k-r+1) for the rest, with connection costs
// x_i = max{0, (max_j dx_j - dx_i)/2} and the remainder of the matrix
// completed by metric_closure. Iterative best response from the
// (1+k)-facility profile migrates every batch to the hub.
GeneratedInstance gen_metric_pos(int n, double p_remain, double eps);

// Six-cycle with alternating edge lengths 7/18 and 5/18, uniform facility
// cost 1 and unit agents on u_1, u_2, u_3: it has pure Nash equilibria but
// no strong equilibrium (any equilibrium admits a pair deviation to some
// v_i reaching costs 8/9 and 7/9).
GeneratedInstance gen_cycle6();

// SPoA lower bound: d(u_i, v_eq) = alpha/i - 1/n and d(u_i, v_opt) = eps;
// all-at-v_eq is an alpha-approximate strong equilibrium of cost exactly
// alpha H(n) while the optimum costs at most 1 + n eps.
GeneratedInstance gen_spoa_lb(int n, double alpha, double eps);

// Dispatch by CLI name: two-node | nonmetric-pos | metric-pos | cycle6 | spoa-lb.
struct GeneratorParams {
  int n = 4;
  double beta = 1.0;
  double alpha = 2.718281828459045;
  double eps = 1e-4;
  double delta = 1e-6;
  double p_remain = 0.27;
};
GeneratedInstance generate_by_name(const std::string& name, const GeneratorParams& params);
std::vector<std::string> generator_names();

}  // namespace flg

#endif
