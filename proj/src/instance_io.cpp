#include "wcg/instance_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "wcg/builtin.hpp"

namespace wcg {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) {
  throw std::runtime_error("instance JSON: " + msg);
}

const json& field(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) fail(where + " is missing \"" + key + "\"");
  return *it;
}

int int_field(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number_integer()) fail(where + "." + key + " must be an integer");
  return v.get<int>();
}

std::vector<double> double_vector(const json& j, const std::string& where, size_t want) {
  if (!j.is_array()) fail(where + " must be an array");
  if (j.size() != want)
    fail(where + " has " + std::to_string(j.size()) + " entries, expected " +
         std::to_string(want));
  std::vector<double> out;
  out.reserve(want);
  for (size_t k = 0; k < j.size(); ++k) {
    const json& v = j[k];
    if (!v.is_number()) fail(where + "[" + std::to_string(k) + "] must be a number");
    out.push_back(v.get<double>());
  }
  return out;
}

GangSpec parse_gang(const json& j, int i) {
  const std::string where = "gangs[" + std::to_string(i) + "]";
  if (!j.is_object()) fail(where + " must be an object");
  GangSpec g;
  g.num_states = int_field(j, "states", where);
  g.num_actions = int_field(j, "actions", where);
  if (g.num_states < 1) fail(where + ".states must be positive");
  if (g.num_actions < 1) fail(where + ".actions must be positive");

  const json& trans = field(j, "transitions", where);
  if (!trans.is_array() || trans.size() != static_cast<size_t>(g.num_actions))
    fail(where + ".transitions must be one matrix per action");
  g.transitions.resize(g.num_actions);
  for (int a = 0; a < g.num_actions; ++a) {
    const json& mat = trans[a];
    const std::string mwhere = where + ".transitions[" + std::to_string(a) + "]";
    if (!mat.is_array() || mat.size() != static_cast<size_t>(g.num_states))
      fail(mwhere + " must have one row per state");
    g.transitions[a].resize(g.num_states);
    for (int s = 0; s < g.num_states; ++s)
      g.transitions[a][s] =
          double_vector(mat[s], mwhere + "[" + std::to_string(s) + "]", g.num_states);
  }

  const json& rew = field(j, "rewards", where);
  if (!rew.is_array() || rew.size() != static_cast<size_t>(g.num_states))
    fail(where + ".rewards must have one row per state");
  g.rewards.resize(g.num_states);
  for (int s = 0; s < g.num_states; ++s)
    g.rewards[s] = double_vector(rew[s], where + ".rewards[" + std::to_string(s) + "]",
                                 g.num_actions);
  return g;
}

void apply_overrides(WcgInstance& inst, const json& j) {
  if (auto it = j.find("horizon"); it != j.end()) {
    if (!it->is_number_integer()) fail("horizon must be an integer");
    inst.horizon = it->get<int>();
  }
  if (auto it = j.find("base_pops"); it != j.end()) {
    if (!it->is_array() || it->size() != inst.gangs.size())
      fail("base_pops must list one entry per gang");
    inst.base_pops.clear();
    for (size_t i = 0; i < it->size(); ++i) {
      const json& v = (*it)[i];
      if (!v.is_number_integer()) fail("base_pops[" + std::to_string(i) + "] must be an integer");
      inst.base_pops.push_back(v.get<std::int64_t>());
    }
  }
  if (auto it = j.find("init_dist"); it != j.end()) {
    if (!it->is_array() || it->size() != inst.gangs.size())
      fail("init_dist must list one distribution per gang");
    inst.init_dist.clear();
    for (size_t i = 0; i < it->size(); ++i)
      inst.init_dist.push_back(double_vector((*it)[i], "init_dist[" + std::to_string(i) + "]",
                                             inst.gangs[i].num_states));
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

WcgInstance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(std::string("parse error: ") + e.what());
  }
  if (!j.is_object()) fail("top level must be an object");
  const json& fmt = field(j, "format", "top level");
  if (!fmt.is_string() || fmt.get<std::string>() != "wcg-v1")
    fail("format must be the string \"wcg-v1\"");

  if (auto it = j.find("builtin"); it != j.end()) {
    if (!it->is_string()) fail("builtin must be a string");
    WcgInstance inst = make_builtin(it->get<std::string>());
    apply_overrides(inst, j);
    return inst;
  }

  WcgInstance inst;
  const json& gangs = field(j, "gangs", "top level");
  if (!gangs.is_array() || gangs.empty()) fail("gangs must be a non-empty array");
  for (size_t i = 0; i < gangs.size(); ++i)
    inst.gangs.push_back(parse_gang(gangs[i], static_cast<int>(i)));

  const json& cons = field(j, "constraints", "top level");
  if (!cons.is_array()) fail("constraints must be an array");
  for (size_t l = 0; l < cons.size(); ++l) {
    const json& per_gang = cons[l];
    const std::string where = "constraints[" + std::to_string(l) + "]";
    if (!per_gang.is_array() || per_gang.size() != inst.gangs.size())
      fail(where + " must list one table per gang");
    ConstraintTable table;
    for (size_t i = 0; i < per_gang.size(); ++i) {
      const json& rows = per_gang[i];
      const GangSpec& g = inst.gangs[i];
      const std::string gwhere = where + "[" + std::to_string(i) + "]";
      if (!rows.is_array() || rows.size() != static_cast<size_t>(g.num_states))
        fail(gwhere + " must have one row per state");
      std::vector<std::vector<double>> parsed;
      for (int s = 0; s < g.num_states; ++s)
        parsed.push_back(
            double_vector(rows[s], gwhere + "[" + std::to_string(s) + "]", g.num_actions));
      table.per_gang.push_back(std::move(parsed));
    }
    inst.constraints.push_back(std::move(table));
  }

  inst.horizon = int_field(j, "horizon", "top level");

  const json& pops = field(j, "base_pops", "top level");
  if (!pops.is_array() || pops.size() != inst.gangs.size())
    fail("base_pops must list one entry per gang");
  for (size_t i = 0; i < pops.size(); ++i) {
    const json& v = pops[i];
    if (!v.is_number_integer()) fail("base_pops[" + std::to_string(i) + "] must be an integer");
    inst.base_pops.push_back(v.get<std::int64_t>());
  }

  const json& init = field(j, "init_dist", "top level");
  if (!init.is_array() || init.size() != inst.gangs.size())
    fail("init_dist must list one distribution per gang");
  for (size_t i = 0; i < init.size(); ++i)
    inst.init_dist.push_back(double_vector(init[i], "init_dist[" + std::to_string(i) + "]",
                                           inst.gangs[i].num_states));
  return inst;
}

WcgInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

std::string instance_to_json(const WcgInstance& inst) {
  ordered_json j;
  j["format"] = "wcg-v1";
  j["horizon"] = inst.horizon;
  j["base_pops"] = inst.base_pops;
  ordered_json gangs = ordered_json::array();
  for (const GangSpec& g : inst.gangs) {
    ordered_json jg;
    jg["states"] = g.num_states;
    jg["actions"] = g.num_actions;
    jg["transitions"] = g.transitions;
    jg["rewards"] = g.rewards;
    gangs.push_back(std::move(jg));
  }
  j["gangs"] = std::move(gangs);
  ordered_json cons = ordered_json::array();
  for (const ConstraintTable& table : inst.constraints) cons.push_back(table.per_gang);
  j["constraints"] = std::move(cons);
  j["init_dist"] = inst.init_dist;
  return j.dump(2) + "\n";
}

std::string solution_to_json(const LpProblem& lp, const LpSolution& sol) {
  ordered_json j;
  switch (sol.status) {
    case LpStatus::Optimal:
      j["status"] = "optimal";
      break;
    case LpStatus::Infeasible:
      j["status"] = "infeasible";
      break;
    case LpStatus::Unbounded:
      j["status"] = "unbounded";
      break;
  }
  j["objective"] = sol.objective;
  j["iterations"] = sol.iterations;
  ordered_json slices = ordered_json::array();
  if (!sol.x.empty()) {
    for (int t = 0; t < lp.num_slices; ++t) {
      ordered_json slice = ordered_json::array();
      for (int v = 0; v < lp.index.triple_count(); ++v) slice.push_back(sol.x[lp.var(t, v)]);
      slices.push_back(std::move(slice));
    }
  }
  j["x"] = std::move(slices);
  j["residuals"] = {{"primal_residual", sol.primal_residual}, {"dual_gap", sol.dual_gap}};
  if (!sol.infeasible_rows.empty()) j["infeasible_rows"] = sol.infeasible_rows;
  return j.dump(2) + "\n";
}

std::string alpha_to_csv(const GsaIndex& idx, const std::vector<std::vector<double>>& alpha) {
  std::string out = "t,gang,state,action,alpha\n";
  for (size_t t = 0; t < alpha.size(); ++t)
    for (int v = 0; v < idx.triple_count(); ++v) {
      const TripleRef ref = idx.triple_at(v);
      out += std::to_string(t) + "," + std::to_string(ref.gang) + "," +
             std::to_string(ref.state) + "," + std::to_string(ref.action) + "," +
             format_double(alpha[t][v]) + "\n";
    }
  return out;
}

std::string trajectory_to_csv(const std::vector<EpisodeResult>& episodes) {
  std::string out = "rep,t,gsa_flat,count\n";
  for (size_t rep = 0; rep < episodes.size(); ++rep)
    for (const OccupancyCounts& occ : episodes[rep].occupancies)
      for (size_t v = 0; v < occ.counts.size(); ++v)
        out += std::to_string(rep) + "," + std::to_string(occ.t) + "," + std::to_string(v) +
               "," + std::to_string(occ.counts[v]) + "\n";
  return out;
}

std::string sweep_to_csv(const std::vector<SweepPoint>& points) {
  std::string out = "h,policy,mean_reward,ci,subopt,p_hat,median_dev\n";
  for (const SweepPoint& p : points)
    out += std::to_string(p.h) + "," + p.policy + "," + format_double(p.mean_reward) + "," +
           format_double(p.ci_half) + "," + format_double(p.subopt) + "," +
           format_double(p.p_hat) + "," + format_double(p.median_dev) + "\n";
  return out;
}

std::vector<SweepPoint> sweep_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "h,policy,mean_reward,ci,subopt,p_hat,median_dev")
    throw std::runtime_error("sweep CSV: unexpected header");
  std::vector<SweepPoint> points;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
      const size_t pos = line.find(',', start);
      parts.push_back(line.substr(start, pos == std::string::npos ? pos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (parts.size() != 7)
      throw std::runtime_error("sweep CSV line " + std::to_string(lineno) +
                               ": expected 7 fields");
    SweepPoint p;
    p.h = std::strtoll(parts[0].c_str(), nullptr, 10);
    p.policy = parts[1];
    p.mean_reward = std::strtod(parts[2].c_str(), nullptr);
    p.ci_half = std::strtod(parts[3].c_str(), nullptr);
    p.subopt = std::strtod(parts[4].c_str(), nullptr);
    p.p_hat = std::strtod(parts[5].c_str(), nullptr);
    p.median_dev = std::strtod(parts[6].c_str(), nullptr);
    points.push_back(std::move(p));
  }
  return points;
}

std::string sweep_to_json(const std::vector<SweepPoint>& points,
                          const std::vector<std::pair<std::string, LinearFit>>& fits) {
  ordered_json j;
  ordered_json rows = ordered_json::array();
  for (const SweepPoint& p : points) {
    ordered_json row;
    row["h"] = p.h;
    row["policy"] = p.policy;
    row["reps"] = p.reps;
    row["mean_reward"] = p.mean_reward;
    row["ci"] = p.ci_half;
    row["subopt"] = p.subopt;
    row["p_hat"] = p.p_hat;
    row["median_dev"] = p.median_dev;
    rows.push_back(std::move(row));
  }
  j["points"] = std::move(rows);
  ordered_json jfits;
  for (const auto& [policy, fit] : fits) {
    ordered_json jf;
    jf["ok"] = fit.ok;
    jf["slope"] = fit.slope;
    jf["intercept"] = fit.intercept;
    jf["r2"] = fit.r2;
    jf["points"] = fit.points;
    jfits[policy] = std::move(jf);
  }
  j["rate_fit"] = std::move(jfits);
  return j.dump(2) + "\n";
}

}  // namespace wcg
