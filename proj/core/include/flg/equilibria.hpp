#ifndef FLG_EQUILIBRIA_HPP
#define FLG_EQUILIBRIA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flg/instance.hpp"

namespace flg {

// True iff no single agent can cut its cost by a factor strictly greater
// than alpha (alpha = 1 reduces to the additive strict test).
bool is_pure_nash(const GameInstance& inst, const StrategyProfile& s, double alpha = 1.0);

enum class DeviationMode { kJoint, kSingleTarget };

struct DeviationMove {
  std::vector<int> coalition;       // ascending agent indices
  std::vector<int> targets;         // parallel to coalition; every target != current node
  DeviationMode mode = DeviationMode::kJoint;
  std::vector<double> improvement_factors; // c_i(s) / c_i(s'), all > alpha
};

struct CoalitionSearchCaps {
  int max_n_joint = 8;
  int max_m_joint = 8;
  int max_n_single = 16;
};

// First coalition deviation improving every member by a factor strictly
// greater than alpha, under the deterministic order: coalitions by size then
// lexicographic, targets lexicographic. Members must actually move (target
// != current node), so applying the move changes exactly the coalition.
// Returns nullopt if the profile is an alpha-approximate (strong) fixpoint.
std::optional<DeviationMove> find_coalition_deviation(const GameInstance& inst,
                                                      const StrategyProfile& s, double alpha,
                                                      DeviationMode mode,
                                                      const CoalitionSearchCaps& caps = {});

enum class EquilibriumKind { kNash, kStrong };

struct EnumerationCaps {
  std::uint64_t max_profiles_nash = 20000000;
  std::uint64_t max_profiles_strong = 2000000;
  CoalitionSearchCaps coalition;
  int jobs = 1;
};

// Complete list of profiles passing the Nash / strong test, in ascending
// odometer order (agent 0 most significant). Strong filtering checks Nash
// first; a strong equilibrium is in particular a pure Nash equilibrium.
std::vector<StrategyProfile> enumerate_equilibria(const GameInstance& inst, double alpha,
                                                  EquilibriumKind kind,
                                                  DeviationMode mode = DeviationMode::kJoint,
                                                  const EnumerationCaps& caps = {});

struct CycleRecord {
  std::vector<StrategyProfile> profiles; // s^1 .. s^k with s^1 == s^k
  std::vector<DeviationMove> moves;      // k-1 moves
  // Filled by damage_accounting:
  std::vector<double> impr_values;
  std::vector<double> dam_values;
  double dam_max = 0.0;
};

struct CoalitionDynamicsResult {
  enum class Outcome { kEquilibrium, kCycle, kCapExceeded };
  Outcome outcome = Outcome::kCapExceeded;
  StrategyProfile equilibrium; // set when outcome == kEquilibrium
  CycleRecord cycle;           // set when outcome == kCycle
  int steps_taken = 0;
};

// Repeatedly applies the first alpha-improving coalition move (or, with
// random_seed set, a uniformly chosen improving move) until either no move
// exists, a profile repeats (closed cycle), or max_steps runs out.
CoalitionDynamicsResult coalition_dynamics(const GameInstance& inst, const StrategyProfile& start,
                                           double alpha, DeviationMode mode, int max_steps,
                                           std::optional<std::uint64_t> random_seed = std::nullopt,
                                           const CoalitionSearchCaps& caps = {});

struct DamageReport {
  std::vector<double> impr_values; // per step, weighted improvement of the coalition
  std::vector<double> dam_values;  // per step, weighted damage to bystanders
  double dam_max = 0.0;            // max_j dam(I_j)^{1/W(I_j)}
  double telescoping_product = 0.0; // prod_j impr_j / dam_j, must be 1
  bool telescoping_ok = false;
};

// impr(I_j) = prod_{i in I_j} (c_i(s^j)/c_i(s^{j+1}))^{w_i},
// dam(I_j)  = prod_{i not in I_j} (c_i(s^{j+1})/c_i(s^j))^{w_i}.
// Throws if any agent cost along the cycle is zero. Also writes the values
// back into the record.
DamageReport damage_accounting(const GameInstance& inst, CycleRecord& cycle);

// ---- SPoA peeling certificate (general networks) ----

struct FacilityPeel {
  int facility = -1;
  std::vector<int> members_opt;   // A_{s*}(v)
  std::vector<int> members_stay;  // members also choosing v under s
  std::vector<int> misconnected;  // I_{s*}(v)
  std::vector<int> peel_order;    // position p (0-based) holds the agent of I^{p+1} \ I^p
  std::vector<double> witness_slack; // per peeling step, >= -eps when the witness holds
  double lhs = 0.0;               // sum_{i in I} c_i(s)
  double bound = 0.0;             // alpha (sum_i w_i / W(I^i)) c_I(s*)
  bool pass = true;
};

struct SpoaCertificate {
  double alpha = 1.0;
  std::vector<FacilityPeel> facilities;
  bool pass = false;
  std::string failure;
};

// Builds, for every optimum facility, the peeling order of misconnected
// agents by repeatedly extracting an agent not willing to deviate to v with
// the current subset (share counts the subset plus the current load at v),
// and checks the weighted-harmonic bound per facility. A missing witness
// means the input was not actually alpha-approximate strong.
SpoaCertificate spoa_peeling_certificate(const GameInstance& inst, const StrategyProfile& s,
                                         const StrategyProfile& s_opt, double alpha);

std::string to_json_string(const SpoaCertificate& cert);

// ---- Metric SPoA audit (unweighted metric networks) ----

struct Slack {
  double value = 0.0; // bound - attained; passes when >= -eps
  bool pass = true;
};

struct MetricFacilityAudit {
  int facility = -1;
  std::vector<int> members_opt;  // A_{s*}(v)
  std::vector<int> members_stay; // A_s(v)
  std::vector<int> misconnected; // I_{s*}(v)
  std::vector<int> outsiders;    // R: agents at v under s from outside A_{s*}(v)
  double ratio = 0.0;            // sum_{i in A_{s*}(v)} c_i(s) / c_v(s*)

  enum class Case { kSimple, kMinimalSubset } tag = Case::kSimple;

  // Simple case: ratio <= 1 + alpha.
  Slack simple;

  // Minimal-subset case.
  int min_subset_size = 0;                     // k0
  int settled_size = 0;                        // r = k0 + |A_s(v)|
  std::vector<std::vector<int>> minimal_subsets; // all size-k0 subsets with a willing agent
  std::vector<int> lex_first_subset;
  std::vector<int> disagreeing;  // I^0 actually used (after the proof's exchanges)
  int unstable = -1;             // the willing agent i in I^0
  std::vector<int> j_order;      // J_{s*}(v) in slot order (slot j has coalition size k0 + j)
  Slack ineq_willing;            // strict lower bound on c_i(s)
  std::vector<double> minimality_slack; // per member of I^0, not willing at size k0 - 1
  Slack minimality_sum;          // summed upper bound for I^0
  std::vector<double> superset_slack;   // per J slot, |R| omitted (asserted)
  std::vector<double> superset_slack_with_r; // reported only
  Slack superset_sum;            // summed upper bound for J
  Slack connection_lb;           // lower bound on sum_{j in J} x_j*
  Slack assembled;               // per-facility ratio vs the assembled bound

  bool pass = true;
};

struct MetricSpoaAudit {
  double alpha = 1.0;
  std::vector<MetricFacilityAudit> facilities;
  double max_ratio = 0.0;
  bool pass = false;
  std::string failure;
};

// Requires a metric instance with unit weights and an s verified
// alpha-approximate strong. Willingness "under s_{-R}" counts the deviating
// coalition plus A_s(v) in the share denominator, excluding R.
MetricSpoaAudit metric_spoa_audit(const GameInstance& inst, const StrategyProfile& s,
                                  const StrategyProfile& s_opt, double alpha);

std::string to_json_string(const MetricSpoaAudit& audit);

}  // namespace flg

#endif
