#include <cstdint>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "wcg/builtin.hpp"
#include "wcg/instance_io.hpp"
#include "wcg/lp.hpp"
#include "wcg/oracle.hpp"
#include "wcg/rng.hpp"
#include "wcg/simulator.hpp"
#include "wcg/validate.hpp"

namespace {

using namespace wcg;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Args {
  std::string instance;
  std::string builtin;
  std::string out;
  std::string format;  // empty means the subcommand default

  std::string format_or(const char* fallback) const {
    return format.empty() ? fallback : format;
  }
  std::string h_list_text;
  std::vector<std::string> policies;
  std::string policy = "fab";
  std::int64_t h = 1;
  int reps = 100;
  std::uint64_t seed = 12345;
  double epsilon = 0.05;
  std::int64_t cap = 1000000;
  std::vector<int> ranking;
  double budget = 0.0;
};

WcgInstance load_instance_arg(const Args& a) {
  if (a.instance.empty() == a.builtin.empty())
    throw UsageError("provide exactly one of --instance or --builtin");
  if (!a.builtin.empty()) return make_builtin(a.builtin);
  return load_instance(a.instance);
}

std::vector<std::int64_t> parse_h_list(const std::string& text) {
  if (text.empty()) throw UsageError("--h-list is required (start:stop[:step] or a,b,c)");
  std::vector<std::int64_t> hs;
  const auto to_int = [&](const std::string& s) {
    try {
      size_t used = 0;
      const std::int64_t v = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw UsageError("--h-list: cannot parse \"" + s + "\" as an integer");
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
      const size_t pos = text.find(':', start);
      parts.push_back(text.substr(start, pos == std::string::npos ? pos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (parts.size() < 2 || parts.size() > 3)
      throw UsageError("--h-list range must be start:stop or start:stop:step");
    const std::int64_t lo = to_int(parts[0]);
    const std::int64_t hi = to_int(parts[1]);
    const std::int64_t step = parts.size() == 3 ? to_int(parts[2]) : 1;
    if (step <= 0 || lo > hi) throw UsageError("--h-list range must ascend with positive step");
    for (std::int64_t v = lo; v <= hi; v += step) hs.push_back(v);
  } else {
    size_t start = 0;
    while (start <= text.size()) {
      const size_t pos = text.find(',', start);
      hs.push_back(to_int(text.substr(start, pos == std::string::npos ? pos : pos - start)));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
  }
  for (std::int64_t v : hs)
    if (v < 1) throw UsageError("--h-list values must be positive");
  return hs;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write output file: " + path);
  f << content;
}

// Status stream: stderr when the export itself goes to stdout.
std::ostream& info_stream(const Args& a) { return a.out.empty() ? std::cerr : std::cout; }

void report_validation(const ValidationReport& rep, std::ostream& os) {
  os << "max row residual: " << format_double(rep.max_row_residual) << "\n";
  for (const ValidationIssue& e : rep.errors) os << "error [" << e.code << "] " << e.message << "\n";
  for (const ValidationIssue& w : rep.warnings)
    os << "warning [" << w.code << "] " << w.message << "\n";
  os << "feasibility assumption: " << (rep.assumption_holds ? "holds" : "fails") << "\n";
}

ValidationReport require_valid(const WcgInstance& inst) {
  ValidationReport rep = validate_instance(inst);
  if (!rep.ok()) {
    report_validation(rep, std::cerr);
    throw std::runtime_error("instance failed validation");
  }
  return rep;
}

PolicySpec make_policy_spec(const std::string& name, const Args& a) {
  PolicySpec spec;
  spec.kind = policy_from_name(name);
  if (spec.kind == PolicyKind::Priority) {
    if (a.ranking.empty())
      throw UsageError("--ranking is required for the priority policy");
    if (!(a.budget > 0.0 && a.budget < 1.0))
      throw UsageError("--budget must lie strictly between 0 and 1 for the priority policy");
    spec.ranking = a.ranking;
    spec.budget = a.budget;
  }
  return spec;
}

struct SolvedModel {
  LpProblem lp;
  LpSolution sol;
  PolicyContext ctx;
};

SolvedModel solve_model(const WcgInstance& inst) {
  SolvedModel m;
  m.lp = build_lp(inst);
  m.sol = solve_lp(m.lp);
  if (m.sol.status != LpStatus::Optimal) {
    std::string msg = "occupancy program is not solvable: ";
    msg += m.sol.status == LpStatus::Infeasible ? "infeasible" : "unbounded";
    if (!m.sol.infeasible_rows.empty()) {
      msg += " (rows";
      for (int r : m.sol.infeasible_rows) msg += " " + std::to_string(r);
      msg += ")";
    }
    throw std::runtime_error(msg);
  }
  m.ctx = make_policy_context(m.lp, m.sol);
  return m;
}

void print_point(const SweepPoint& p, std::ostream& os) {
  os << "h=" << p.h << " policy=" << p.policy << " reps=" << p.reps
     << " mean_reward=" << format_double(p.mean_reward) << " ci=" << format_double(p.ci_half)
     << " subopt=" << format_double(p.subopt) << " p_hat=" << format_double(p.p_hat)
     << " median_dev=" << format_double(p.median_dev) << "\n";
}

void print_fit(const std::string& policy, const LinearFit& fit, std::ostream& os) {
  if (fit.ok)
    os << "exceedance decay fit policy=" << policy << ": slope=" << format_double(fit.slope)
       << " intercept=" << format_double(fit.intercept) << " r2=" << format_double(fit.r2)
       << " points=" << fit.points << "\n";
  else
    os << "exceedance decay fit policy=" << policy
       << ": not enough usable points (need 3 with 0 < p_hat < 1)\n";
}

// Shared engine behind sweep and converge: one Monte Carlo cell per
// (policy, h), each under its own child seed, plus a decay fit per policy.
int run_cells(const Args& a, const std::vector<std::string>& policies) {
  const WcgInstance inst = load_instance_arg(a);
  require_valid(inst);
  const std::vector<std::int64_t> hs = parse_h_list(a.h_list_text);
  SolvedModel model = solve_model(inst);
  std::ostream& os = info_stream(a);
  os << "lp objective: " << format_double(model.sol.objective) << "\n";

  std::vector<SweepPoint> points;
  std::vector<std::pair<std::string, LinearFit>> fits;
  std::uint64_t cell = 0;
  for (const std::string& name : policies) {
    const PolicySpec spec = make_policy_spec(name, a);
    std::vector<double> fit_h, fit_p;
    for (std::int64_t h : hs) {
      SweepPoint p =
          monte_carlo(model.ctx, spec, h, a.reps, child_seed(a.seed, cell++), a.epsilon);
      print_point(p, os);
      fit_h.push_back(static_cast<double>(h));
      fit_p.push_back(p.p_hat);
      points.push_back(std::move(p));
    }
    fits.emplace_back(name, rate_fit(fit_h, fit_p));
    print_fit(name, fits.back().second, os);
  }
  write_output(a.out, a.format_or("csv") == "json" ? sweep_to_json(points, fits)
                                                  : sweep_to_csv(points));
  return 0;
}

int run_validate(const Args& a) {
  const WcgInstance inst = load_instance_arg(a);
  const ValidationReport rep = validate_instance(inst);
  report_validation(rep, std::cout);
  if (!rep.ok()) {
    std::cout << "instance invalid\n";
    return 2;
  }
  std::cout << "instance ok\n";
  return 0;
}

int run_solve(const Args& a) {
  const WcgInstance inst = load_instance_arg(a);
  require_valid(inst);
  SolvedModel model = solve_model(inst);
  std::ostream& os = info_stream(a);
  os << "objective: " << format_double(model.sol.objective) << "\n";
  os << "iterations: " << model.sol.iterations << "\n";
  os << "primal residual: " << format_double(model.sol.primal_residual) << "\n";
  os << "dual gap: " << format_double(model.sol.dual_gap) << "\n";
  if (a.format_or("json") == "json") {
    write_output(a.out, solution_to_json(model.lp, model.sol));
  } else {
    write_output(a.out,
                 alpha_to_csv(model.lp.index, action_probabilities(model.lp, model.sol.x)));
  }
  return 0;
}

int run_simulate(const Args& a) {
  const WcgInstance inst = load_instance_arg(a);
  require_valid(inst);
  if (a.h < 1) throw UsageError("--h must be positive");
  SolvedModel model = solve_model(inst);
  const PolicySpec spec = make_policy_spec(a.policy, a);
  std::ostream& os = info_stream(a);
  os << "lp objective: " << format_double(model.sol.objective) << "\n";

  const SweepPoint point = monte_carlo(model.ctx, spec, a.h, a.reps, a.seed, a.epsilon);
  print_point(point, os);

  if (a.format_or("csv") == "json") {
    write_output(a.out, sweep_to_json({point}, {}));
  } else if (!a.out.empty()) {
    // replay the same child seeds with recording on to dump trajectories
    std::vector<EpisodeResult> episodes;
    EpisodeOptions opts;
    opts.record_trajectory = true;
    episodes.reserve(static_cast<size_t>(a.reps));
    for (int r = 0; r < a.reps; ++r)
      episodes.push_back(run_episode(model.ctx, spec, a.h, child_seed(a.seed, r), opts));
    write_output(a.out, trajectory_to_csv(episodes));
  }
  return 0;
}

int run_oracle(const Args& a) {
  const WcgInstance inst = load_instance_arg(a);
  require_valid(inst);
  if (a.h < 1) throw UsageError("--h must be positive");
  SolvedModel model = solve_model(inst);
  const double exact = exact_oracle(inst, a.h, a.cap);
  std::cout << "h: " << a.h << "\n";
  std::cout << "exact optimum: " << format_double(exact) << "\n";
  std::cout << "lp bound: " << format_double(model.sol.objective) << "\n";
  const double gap = model.sol.objective - exact;
  std::cout << "bound gap: " << format_double(gap) << "\n";
  if (!a.out.empty()) {
    std::string json = "{\n";
    json += "  \"h\": " + std::to_string(a.h) + ",\n";
    json += "  \"oracle\": " + format_double(exact) + ",\n";
    json += "  \"lp_bound\": " + format_double(model.sol.objective) + ",\n";
    json += "  \"gap\": " + format_double(gap) + "\n";
    json += "}\n";
    write_output(a.out, json);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weakly coupled gangs: occupancy LP, simulation policies, experiments"};
  // long-only help so --h stays available as the scale flag
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1);
  Args a;

  const auto add_source = [&](CLI::App* cmd) {
    cmd->add_option("--instance", a.instance, "instance JSON file (wcg-v1 schema)");
    cmd->add_option("--builtin", a.builtin,
                    "bundled generator name (appendix-g, appendix-g-usage)");
  };
  const auto add_output = [&](CLI::App* cmd, const char* fmt) {
    cmd->add_option("--out", a.out, "write the export here instead of stdout");
    cmd->add_option("--format", a.format, std::string("export format (default ") + fmt + ")")
        ->check(CLI::IsMember({"csv", "json"}));
  };
  const auto add_mc = [&](CLI::App* cmd) {
    cmd->add_option("--reps", a.reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", a.seed, "master seed; replications use child seeds");
    cmd->add_option("--epsilon", a.epsilon, "deviation threshold for exceedance rates")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--ranking", a.ranking,
                    "priority policy: (gang,state) pair ids, best first")
        ->delimiter(',');
    cmd->add_option("--budget", a.budget, "priority policy: activation share in (0,1)");
  };

  CLI::App* validate_cmd = app.add_subcommand("validate", "check an instance and report");
  add_source(validate_cmd);

  CLI::App* solve_cmd =
      app.add_subcommand("solve", "solve the occupancy program and export the solution");
  add_source(solve_cmd);
  add_output(solve_cmd, "json");

  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "Monte Carlo episodes at a single population scale");
  add_source(simulate_cmd);
  simulate_cmd->add_option("--policy", a.policy, "fab, lp-approx, greedy or priority");
  simulate_cmd->add_option("--h", a.h, "population scale multiplier");
  add_mc(simulate_cmd);
  add_output(simulate_cmd, "csv");

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "suboptimality and deviation across population scales");
  add_source(sweep_cmd);
  sweep_cmd->add_option("--h-list", a.h_list_text, "scales: start:stop[:step] or a,b,c");
  sweep_cmd
      ->add_option("--policy", a.policies,
                   "policies to sweep (default fab,lp-approx,greedy)")
      ->delimiter(',');
  add_mc(sweep_cmd);
  add_output(sweep_cmd, "csv");

  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle", "exact optimum of the finite instance by dynamic programming");
  add_source(oracle_cmd);
  oracle_cmd->add_option("--h", a.h, "population scale multiplier");
  oracle_cmd->add_option("--cap", a.cap, "abort above this many census-epoch pairs")
      ->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--out", a.out, "write a JSON summary here");

  CLI::App* converge_cmd = app.add_subcommand(
      "converge", "exceedance decay study for one policy across scales");
  add_source(converge_cmd);
  converge_cmd->add_option("--policy", a.policy, "policy under study");
  converge_cmd->add_option("--h-list", a.h_list_text, "scales: start:stop[:step] or a,b,c");
  add_mc(converge_cmd);
  add_output(converge_cmd, "csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(validate_cmd)) return run_validate(a);
    if (app.got_subcommand(solve_cmd)) return run_solve(a);
    if (app.got_subcommand(simulate_cmd)) return run_simulate(a);
    if (app.got_subcommand(oracle_cmd)) return run_oracle(a);
    if (app.got_subcommand(sweep_cmd)) {
      std::vector<std::string> policies = a.policies;
      if (policies.empty()) policies = {"fab", "lp-approx", "greedy"};
      return run_cells(a, policies);
    }
    if (app.got_subcommand(converge_cmd)) return run_cells(a, {a.policy});
    throw UsageError("no subcommand given");
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
