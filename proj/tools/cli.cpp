#include "cli.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "flg/bounds.hpp"
#include "flg/constructions.hpp"
#include "flg/dynamics.hpp"
#include "flg/equilibria.hpp"
#include "flg/instance.hpp"
#include "flg/optimum.hpp"

namespace flg::cli {

namespace {

constexpr int kOk = 0;
constexpr int kClaimFailure = 1;
constexpr int kInputError = 2;

std::string g6(double x) { return fmt_g6(x); }

StrategyProfile resolve_profile(const GameInstance& inst, const std::string& spec) {
  if (spec == "opt") return social_optimum(inst).assignment;
  if (spec == "star") {
    auto it = inst.annotations.find("s_star");
    if (it == inst.annotations.end()) {
      throw ParseError("instance file carries no '# s_star:' annotation");
    }
    return parse_profile(it->second, inst.num_agents(), inst.node_count);
  }
  return parse_profile(spec, inst.num_agents(), inst.node_count);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot write file: " + path);
  f << content;
}

DeviationMode parse_mode(const std::string& mode) {
  if (mode == "joint") return DeviationMode::kJoint;
  if (mode == "single-target") return DeviationMode::kSingleTarget;
  throw ParseError("mode must be joint|single-target");
}

struct RangeSpec {
  double lo = 1.0;
  double hi = 100.0;
  int steps = 10000;
};

RangeSpec parse_range(const std::string& text) {
  RangeSpec r;
  std::istringstream is(text);
  std::string a, b, c;
  if (!std::getline(is, a, ':') || !std::getline(is, b, ':') || !std::getline(is, c)) {
    throw ParseError("range must be lo:hi:steps");
  }
  try {
    r.lo = std::stod(a);
    r.hi = std::stod(b);
    r.steps = std::stoi(c);
  } catch (const std::exception&) {
    throw ParseError("range must be lo:hi:steps");
  }
  if (!(r.hi > r.lo) || r.steps < 2) throw ParseError("range must satisfy lo < hi, steps >= 2");
  return r;
}

std::string curve_csv(const bounds::BoundCurve& curve) {
  std::ostringstream csv;
  csv << "x,f\n";
  for (const auto& [x, f] : curve.samples) csv << fmt_full(x) << "," << fmt_full(f) << "\n";
  csv << "# argmax=" << fmt_full(curve.argmax) << " max=" << fmt_full(curve.max) << "\n";
  return csv.str();
}

int cmd_opt(const std::string& file, std::ostream& out) {
  GameInstance inst = load_instance_file(file);
  OptimumSolution opt = social_optimum(inst);
  out << "opt_cost=" << g6(opt.cost) << " open=" << format_profile(opt.open_set)
      << " assignment=" << format_profile(opt.assignment) << "\n";
  return kOk;
}

int cmd_cost(const std::string& file, const std::string& profile_spec, std::ostream& out) {
  GameInstance inst = load_instance_file(file);
  StrategyProfile s = resolve_profile(inst, profile_spec);
  validate_profile(inst, s);
  CostBreakdown cb = social_cost(inst, s);
  out << "agent,node,connection,share,total\n";
  for (int i = 0; i < inst.num_agents(); ++i) {
    out << i << "," << s[i] << "," << g6(cb.per_agent_connection[i]) << ","
        << g6(cb.per_agent_share[i]) << ","
        << g6(cb.per_agent_connection[i] + cb.per_agent_share[i]) << "\n";
  }
  out << "open_facilities=" << format_profile(cb.open_facilities) << "\n";
  out << "social_cost=" << g6(cb.social_cost) << "\n";
  return kOk;
}

int cmd_ibr(const std::string& file, const std::string& start_spec, const std::string& order_spec,
            int max_steps, const std::string& csv_path, std::ostream& out) {
  GameInstance inst = load_instance_file(file);
  StrategyProfile start = resolve_profile(inst, start_spec);
  OrderPolicy policy = OrderPolicy::kRoundRobin;
  std::vector<int> explicit_order;
  if (order_spec == "facility") {
    policy = OrderPolicy::kFacilityConsecutive;
  } else if (order_spec != "round-robin") {
    policy = OrderPolicy::kExplicit;
    StrategyProfile ord = parse_profile(order_spec, inst.num_agents(), inst.num_agents());
    explicit_order.assign(ord.begin(), ord.end());
  }
  if (max_steps <= 0) max_steps = default_max_steps(inst);
  DynamicsTrace trace = run_ibr(inst, start, policy, max_steps, explicit_order);
  double c0 = social_cost_value(inst, start);
  double c1 = social_cost_value(inst, trace.final_profile);
  out << "converged=" << (trace.converged ? "true" : "false") << " steps=" << trace.steps.size()
      << " start_cost=" << g6(c0) << " final_cost=" << g6(c1) << " ratio=" << g6(c1 / c0)
      << "\n";
  out << "final=" << format_profile(trace.final_profile) << "\n";
  if (!csv_path.empty()) write_file(csv_path, trace_csv(trace));
  return kOk;
}

int cmd_enumerate(const std::string& file, double alpha, EquilibriumKind kind,
                  const std::string& mode, int jobs, bool list, std::ostream& out) {
  GameInstance inst = load_instance_file(file);
  EnumerationCaps caps;
  caps.jobs = jobs;
  std::vector<StrategyProfile> eqs = enumerate_equilibria(inst, alpha, kind, parse_mode(mode), caps);
  const char* label = (kind == EquilibriumKind::kNash) ? "nash_equilibria" : "strong_equilibria";
  out << label << "=" << eqs.size() << "\n";
  if (list) {
    for (const StrategyProfile& s : eqs) {
      out << "eq cost=" << g6(social_cost_value(inst, s)) << " profile=" << format_profile(s) << "\n";
    }
  }
  return kOk;
}

int cmd_sdyn(const std::string& file, const std::string& start_spec, double alpha,
             const std::string& mode, int max_steps, bool random, std::optional<std::uint64_t> seed,
             std::ostream& out) {
  GameInstance inst = load_instance_file(file);
  StrategyProfile start = resolve_profile(inst, start_spec);
  if (random && !seed) throw ParseError("--random requires an explicit --seed");
  CoalitionDynamicsResult res = coalition_dynamics(
      inst, start, alpha, parse_mode(mode), max_steps, random ? seed : std::nullopt);
  switch (res.outcome) {
    case CoalitionDynamicsResult::Outcome::kEquilibrium:
      out << "outcome=equilibrium steps=" << res.steps_taken
          << " profile=" << format_profile(res.equilibrium)
          << " cost=" << g6(social_cost_value(inst, res.equilibrium)) << "\n";
      break;
    case CoalitionDynamicsResult::Outcome::kCycle: {
      DamageReport rep = damage_accounting(inst, res.cycle);
      out << "outcome=cycle steps=" << res.steps_taken
          << " cycle_length=" << res.cycle.moves.size() << " dam_max=" << g6(rep.dam_max)
          << " telescoping=" << (rep.telescoping_ok ? "ok" : "VIOLATED") << "\n";
      for (size_t j = 0; j < res.cycle.moves.size(); ++j) {
        out << "step " << j << ": coalition=" << format_profile(res.cycle.moves[j].coalition)
            << " targets=" << format_profile(res.cycle.moves[j].targets)
            << " impr=" << g6(rep.impr_values[j]) << " dam=" << g6(rep.dam_values[j]) << "\n";
      }
      if (!rep.telescoping_ok) return kClaimFailure;
      break;
    }
    case CoalitionDynamicsResult::Outcome::kCapExceeded:
      out << "outcome=cap-exceeded steps=" << res.steps_taken << "\n";
      break;
  }
  return kOk;
}

int cmd_ratios(const std::string& file, const std::string& kind, double alpha,
               const std::string& mode, const std::string& csv_path, std::ostream& out) {
  GameInstance inst = load_instance_file(file);
  EquilibriumKind ekind;
  if (kind == "nash") {
    ekind = EquilibriumKind::kNash;
  } else if (kind == "strong") {
    ekind = EquilibriumKind::kStrong;
  } else {
    throw ParseError("--kind must be nash|strong");
  }
  std::vector<StrategyProfile> eqs = enumerate_equilibria(inst, alpha, ekind, parse_mode(mode));
  RatioReport rep = ratios(inst, eqs, alpha, ekind == EquilibriumKind::kStrong);
  if (!rep.undefined_reason.empty()) {
    out << "ratios undefined: " << rep.undefined_reason << " (opt=" << g6(rep.opt_cost)
        << " count=" << rep.equilibrium_count << ")\n";
  } else {
    out << "pos=" << g6(*rep.pos) << " poa=" << g6(*rep.poa);
    if (rep.spoa) out << " spoa=" << g6(*rep.spoa);
    out << " opt=" << g6(rep.opt_cost) << " count=" << rep.equilibrium_count << "\n";
  }
  if (!csv_path.empty()) {
    write_file(csv_path, "opt,min_eq,max_eq,pos,poa,spoa,alpha,count\n" + ratio_report_csv(rep) + "\n");
  }
  return kOk;
}

int cmd_gen(const std::string& name, const GeneratorParams& params, const std::string& out_path,
            std::ostream& out) {
  GeneratedInstance gen = generate_by_name(name, params);
  if (!out_path.empty()) save_instance_file(gen.instance, out_path);
  out << "generator=" << name << " nodes=" << gen.instance.node_count
      << " agents=" << gen.instance.num_agents() << "\n";
  for (const std::string& note : gen.oracle_notes) out << "oracle " << note << "\n";
  if (!out_path.empty()) out << "wrote " << out_path << "\n";
  return kOk;
}

int cmd_bound(const std::string& which, const std::string& range_spec, long long n, double alpha,
              double gamma, bool maximize_r, double remain, long long lambda, double eps,
              const std::string& csv_path, int jobs, std::ostream& out) {
  if (which == "pos-lb-table") {
    bounds::PosLbTableQuery q;
    q.n = n;
    q.maximize_r = maximize_r;
    q.remain_fraction = remain;
    q.eps = eps;
    if (lambda > 0) {
      q.lambda_policy = bounds::LambdaPolicy::kCustom;
      q.lambda_custom = lambda;
    }
    bounds::PosLbTableResult res = bounds::pos_lb_table(q);
    out << "value=" << g6(res.value) << " r=" << res.r << " k=" << res.k << "\n";
    if (!csv_path.empty()) {
      std::ostringstream csv;
      csv << "n,k,r,value\n"
          << n << "," << res.k << "," << res.r << "," << fmt_full(res.value) << "\n";
      write_file(csv_path, csv.str());
    }
    return kOk;
  }
  RangeSpec r = parse_range(range_spec);
  bounds::BoundCurve curve;
  if (which == "pos-ub") {
    curve = bounds::pos_ub_curve(r.lo, r.hi, r.steps, 1e-6, jobs);
  } else if (which == "pos-lb-asym") {
    curve = bounds::pos_lb_asymptotic_curve(r.lo, r.hi, r.steps, 1e-6, jobs);
  } else if (which == "metric-spoa-ub") {
    curve = bounds::metric_spoa_ub_curve(r.lo, r.hi, alpha, gamma, r.steps, 1e-6, jobs);
  } else {
    throw ParseError("bound must be pos-ub|pos-lb-asym|pos-lb-table|metric-spoa-ub");
  }
  out << "argmax=" << g6(curve.argmax) << " max=" << g6(curve.max) << "\n";
  if (curve.invalid_count > 0) {
    out << "invalid_samples=" << curve.invalid_count << " first_at=" << g6(curve.first_invalid_x)
        << "\n";
  }
  if (!csv_path.empty()) write_file(csv_path, curve_csv(curve));
  return kOk;
}

int cmd_audit_charging(const std::string& file, const std::string& start_spec, int max_steps,
                       std::ostream& out) {
  GameInstance inst = load_instance_file(file);
  StrategyProfile start = resolve_profile(inst, start_spec);
  if (max_steps <= 0) max_steps = default_max_steps(inst);
  DynamicsTrace trace = run_ibr(inst, start, OrderPolicy::kRoundRobin, max_steps);
  ChargingAudit audit = charging_audit(inst, trace, start);
  out << "charging_audit=" << (audit.pass ? "pass" : "FAIL") << " steps=" << audit.records.size()
      << " total_charge=" << g6(audit.total_charge) << " cost_delta=" << g6(audit.cost_delta)
      << "\n";
  if (!audit.pass) {
    out << "failure: " << audit.failure << "\n";
    return kClaimFailure;
  }
  return kOk;
}

int verify_strong(const GameInstance& inst, const StrategyProfile& s, double alpha,
                  DeviationMode mode) {
  CoalitionSearchCaps caps;
  caps.max_n_joint = std::max(caps.max_n_joint, inst.num_agents());
  caps.max_m_joint = std::max(caps.max_m_joint, inst.node_count);
  caps.max_n_single = std::max(caps.max_n_single, inst.num_agents());
  auto dev = find_coalition_deviation(inst, s, alpha, mode, caps);
  return dev ? 1 : 0;
}

int cmd_audit_spoa_cert(const std::string& file, const std::string& eq_spec, double alpha,
                        const std::string& json_path, std::ostream& out) {
  GameInstance inst = load_instance_file(file);
  StrategyProfile s = resolve_profile(inst, eq_spec);
  if (verify_strong(inst, s, alpha, DeviationMode::kSingleTarget)) {
    out << "input profile is not alpha-approximate strong (single-target deviation found)\n";
    return kInputError;
  }
  StrategyProfile s_opt = social_optimum(inst).assignment;
  SpoaCertificate cert = spoa_peeling_certificate(inst, s, s_opt, alpha);
  out << "spoa_certificate=" << (cert.pass ? "pass" : "FAIL") << " facilities=" << cert.facilities.size()
      << "\n";
  for (const FacilityPeel& p : cert.facilities) {
    out << "facility " << p.facility << ": misconnected=" << p.misconnected.size()
        << " lhs=" << g6(p.lhs) << " bound=" << g6(p.bound) << " " << (p.pass ? "pass" : "FAIL")
        << "\n";
  }
  if (!json_path.empty()) write_file(json_path, to_json_string(cert));
  if (!cert.pass) {
    out << "failure: " << cert.failure << "\n";
    return kClaimFailure;
  }
  return kOk;
}

int cmd_audit_metric_spoa(const std::string& file, const std::string& eq_spec, double alpha,
                          const std::string& json_path, std::ostream& out) {
  GameInstance inst = load_instance_file(file);
  StrategyProfile s = resolve_profile(inst, eq_spec);
  if (verify_strong(inst, s, alpha, DeviationMode::kJoint)) {
    out << "input profile is not alpha-approximate strong (joint deviation found)\n";
    return kInputError;
  }
  StrategyProfile s_opt = social_optimum(inst).assignment;
  MetricSpoaAudit audit = metric_spoa_audit(inst, s, s_opt, alpha);
  out << "metric_spoa_audit=" << (audit.pass ? "pass" : "FAIL") << " max_ratio=" << g6(audit.max_ratio)
      << " facilities=" << audit.facilities.size() << "\n";
  for (const MetricFacilityAudit& f : audit.facilities) {
    out << "facility " << f.facility << ": case="
        << (f.tag == MetricFacilityAudit::Case::kSimple ? "simple" : "minimal-subset")
        << " ratio=" << g6(f.ratio) << " " << (f.pass ? "pass" : "FAIL") << "\n";
  }
  if (!json_path.empty()) write_file(json_path, to_json_string(audit));
  if (!audit.pass) {
    out << "failure: " << audit.failure << "\n";
    return kClaimFailure;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fair-cost-sharing Facility Location game toolkit"};
  app.require_subcommand(1);

  std::string file, profile_spec = "opt", start_spec = "opt", order_spec = "round-robin";
  std::string mode = "joint", kind = "nash", csv_path, json_path, out_path, range_spec = "1:100:10000";
  std::string gen_name, bound_name, eq_spec;
  double alpha = 1.0, bound_alpha = 2.718281828459045, gamma = bounds::kEulerGamma;
  double remain = 0.27, eps_flag = 0.0;
  long long n_flag = 0, lambda_flag = 0;
  int max_steps = 0, sdyn_max_steps = 1000, jobs = 1;
  bool list = false, random = false, maximize_r = false;
  std::optional<std::uint64_t> seed;
  std::uint64_t seed_value = 0;
  GeneratorParams gp;

  auto* c_opt = app.add_subcommand("opt", "exact social optimum");
  c_opt->add_option("file", file)->required();

  auto* c_cost = app.add_subcommand("cost", "cost breakdown of a profile");
  c_cost->add_option("file", file)->required();
  c_cost->add_option("--profile", profile_spec, "comma-separated nodes, or opt|star")->required();

  auto* c_ibr = app.add_subcommand("ibr", "iterative best response");
  c_ibr->add_option("file", file)->required();
  c_ibr->add_option("--start", start_spec, "profile, or opt|star");
  c_ibr->add_option("--order", order_spec, "round-robin|facility|agent list");
  c_ibr->add_option("--max-steps", max_steps);
  c_ibr->add_option("--trace-csv", csv_path);

  auto* c_nash = app.add_subcommand("nash", "enumerate pure Nash equilibria");
  c_nash->add_option("file", file)->required();
  c_nash->add_option("--alpha", alpha);
  c_nash->add_option("--jobs", jobs);
  c_nash->add_flag("--list", list);

  auto* c_strong = app.add_subcommand("strong", "enumerate strong equilibria");
  c_strong->add_option("file", file)->required();
  c_strong->add_option("--alpha", alpha);
  c_strong->add_option("--mode", mode, "joint|single-target");
  c_strong->add_option("--jobs", jobs);
  c_strong->add_flag("--list", list);

  auto* c_sdyn = app.add_subcommand("sdyn", "coalition deviation dynamics");
  c_sdyn->add_option("file", file)->required();
  c_sdyn->add_option("--start", start_spec)->required();
  c_sdyn->add_option("--alpha", alpha);
  c_sdyn->add_option("--mode", mode);
  c_sdyn->add_option("--max-steps", sdyn_max_steps);
  c_sdyn->add_flag("--random", random, "pick a seeded random improving move instead of the first");
  auto* seed_opt = c_sdyn->add_option("--seed", seed_value);

  auto* c_ratios = app.add_subcommand("ratios", "PoS/PoA/SPoA against the optimum");
  c_ratios->add_option("file", file)->required();
  c_ratios->add_option("--kind", kind, "nash|strong")->required();
  c_ratios->add_option("--alpha", alpha);
  c_ratios->add_option("--mode", mode);
  c_ratios->add_option("--csv", csv_path);

  auto* c_gen = app.add_subcommand("gen", "worst-case instance generators");
  c_gen->add_option("name", gen_name, "two-node|nonmetric-pos|metric-pos|cycle6|spoa-lb")->required();
  c_gen->add_option("--n", gp.n);
  c_gen->add_option("--beta", gp.beta);
  c_gen->add_option("--alpha", gp.alpha);
  c_gen->add_option("--eps", gp.eps);
  c_gen->add_option("--delta", gp.delta);
  c_gen->add_option("--p", gp.p_remain);
  c_gen->add_option("-o,--output", out_path);

  auto* c_bound = app.add_subcommand("bound", "closed-form bound curves and tables");
  c_bound->add_option("name", bound_name, "pos-ub|pos-lb-asym|pos-lb-table|metric-spoa-ub")->required();
  c_bound->add_option("--range", range_spec, "lo:hi:steps");
  c_bound->add_option("--n", n_flag);
  c_bound->add_option("--alpha", bound_alpha);
  c_bound->add_option("--gamma", gamma);
  c_bound->add_flag("--maximize-r", maximize_r);
  c_bound->add_option("--remain", remain, "remaining batch fraction of sqrt(n)");
  c_bound->add_option("--lambda", lambda_flag, "override lambda (default n)");
  c_bound->add_option("--eps", eps_flag);
  c_bound->add_option("--csv", csv_path);
  c_bound->add_option("--jobs", jobs);

  auto* c_audit = app.add_subcommand("audit", "proof-certificate audits");
  c_audit->require_subcommand(1);
  auto* c_charging = c_audit->add_subcommand("charging", "charging scheme along an IBR run");
  c_charging->add_option("file", file)->required();
  c_charging->add_option("--start", start_spec);
  c_charging->add_option("--max-steps", max_steps);
  auto* c_cert = c_audit->add_subcommand("spoa-cert", "SPoA peeling certificate");
  c_cert->add_option("file", file)->required();
  c_cert->add_option("--eq", eq_spec, "the strong-equilibrium profile")->required();
  c_cert->add_option("--alpha", alpha);
  c_cert->add_option("--json", json_path);
  auto* c_mspoa = c_audit->add_subcommand("metric-spoa", "metric SPoA inequality audit");
  c_mspoa->add_option("file", file)->required();
  c_mspoa->add_option("--eq", eq_spec)->required();
  c_mspoa->add_option("--alpha", alpha);
  c_mspoa->add_option("--json", json_path);

  try {
    // CLI11's vector overload consumes arguments back to front.
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  if (seed_opt->count() > 0) seed = seed_value;

  try {
    if (c_opt->parsed()) return cmd_opt(file, out);
    if (c_cost->parsed()) return cmd_cost(file, profile_spec, out);
    if (c_ibr->parsed()) return cmd_ibr(file, start_spec, order_spec, max_steps, csv_path, out);
    if (c_nash->parsed()) return cmd_enumerate(file, alpha, EquilibriumKind::kNash, mode, jobs, list, out);
    if (c_strong->parsed())
      return cmd_enumerate(file, alpha, EquilibriumKind::kStrong, mode, jobs, list, out);
    if (c_sdyn->parsed())
      return cmd_sdyn(file, start_spec, alpha, mode, sdyn_max_steps, random, seed, out);
    if (c_ratios->parsed()) return cmd_ratios(file, kind, alpha, mode, csv_path, out);
    if (c_gen->parsed()) return cmd_gen(gen_name, gp, out_path, out);
    if (c_bound->parsed())
      return cmd_bound(bound_name, range_spec, n_flag, bound_alpha, gamma, maximize_r, remain,
                       lambda_flag, eps_flag, csv_path, jobs, out);
    if (c_charging->parsed()) return cmd_audit_charging(file, start_spec, max_steps, out);
    if (c_cert->parsed()) return cmd_audit_spoa_cert(file, eq_spec, alpha, json_path, out);
    if (c_mspoa->parsed()) return cmd_audit_metric_spoa(file, eq_spec, alpha, json_path, out);
    err << "error: no command\n";
    return kInputError;
  } catch (const std::runtime_error& e) {
    // Generator oracle failures are verified-claim failures; everything else
    // raised here is an input or precondition problem.
    std::string what = e.what();
    if (what.rfind("generator oracle failed", 0) == 0) {
      err << "claim failure: " << what << "\n";
      return kClaimFailure;
    }
    err << "error: " << what << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace flg::cli
