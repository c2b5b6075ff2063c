// Command-line front end. Talks to the analyzer only through the C API.

#include "plcnet/plcnet.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

enum Exit { kOk = 0, kViolated = 1, kUsage = 2, kError = 3 };

struct Owned {
  char* p = nullptr;
  ~Owned() { plcnet_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct ModelHandle {
  plcnet_model* m = nullptr;
  ~ModelHandle() { plcnet_model_free(m); }
};

int report_error(plcnet_status st) {
  std::cerr << "plcnet: " << plcnet_last_error() << "\n";
  return st == PLCNET_E_ARGUMENT ? kUsage : kError;
}

int switch_of(const std::string& v) {
  if (v.empty()) return PLCNET_DEFAULT;
  return v == "on" ? 1 : 0;
}

struct Common {
  std::string scenario;
  std::string mode, por, clock_sep, bound, solver;
  bool solver_given = false;
  bool json_out = false;

  void add(CLI::App* cmd) {
    cmd->add_option("scenario", scenario, "scenario file (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--mode", mode, "concrete or symbolic")->check(CLI::IsMember({"concrete", "symbolic"}));
    cmd->add_option("--por", por, "partial order reduction")->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--clock-sep", clock_sep, "clock separation")->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--bound", bound, "time bound (rational)");
    cmd->add_option("--solver", solver, "external SMT-LIB solver command (\"\" for the built-in procedure only)");
    cmd->add_flag("--json", json_out, "machine-readable output");
  }

  plcnet_options options() const {
    plcnet_options o;
    plcnet_options_init(&o);
    if (!mode.empty()) o.symbolic = mode == "symbolic";
    o.por = switch_of(por);
    o.clock_sep = switch_of(clock_sep);
    if (!bound.empty()) o.bound = bound.c_str();
    if (solver_given) o.solver = solver.c_str();
    return o;
  }
};

std::string stats_line(const json& s) {
  const json& q = s.at("smtQueries");
  std::ostringstream o;
  o << "states: " << s.at("states") << "  transitions: " << s.at("transitions") << "  boundReached: " << s.at("boundReached")
    << "  smt: " << q.at("total") << " (path " << q.at("path") << ", env " << q.at("env") << ", property "
    << q.at("property") << ", bound " << q.at("bound") << ")  unknowns: " << s.at("unknowns") << "  time: " << std::fixed
    << std::setprecision(3) << s.at("seconds").get<double>() << "s";
  return o.str();
}

int cmd_parse(const std::vector<std::string>& files, bool json_out) {
  std::vector<const char*> paths;
  for (const auto& f : files) paths.push_back(f.c_str());
  Owned rep;
  plcnet_status st = plcnet_parse_files(paths.data(), paths.size(), &rep.p);
  if (!rep.p) return report_error(st);
  json r = json::parse(rep.str());
  if (json_out) {
    std::cout << r.dump(2) << "\n";
  } else {
    for (const auto& f : r.at("files")) {
      std::cout << f.at("path").get<std::string>() << ":";
      for (const auto& p : f.at("pous")) std::cout << " " << p.get<std::string>();
      std::cout << "\n";
    }
    for (const auto& e : r.at("errors")) std::cerr << "error: " << e.get<std::string>() << "\n";
    if (r.at("ok").get<bool>()) std::cout << r.at("pous").size() << " POUs elaborated, 0 errors\n";
  }
  return r.at("ok").get<bool>() ? kOk : kError;
}

int cmd_simulate(const Common& c, const std::string& until, std::size_t steps) {
  ModelHandle h;
  if (auto st = plcnet_model_load(c.scenario.c_str(), &h.m)) return report_error(st);
  plcnet_options o = c.options();
  Owned out;
  if (auto st = plcnet_simulate(h.m, &o, until.empty() ? nullptr : until.c_str(), steps, &out.p)) return report_error(st);
  json r = json::parse(out.str());
  if (c.json_out) {
    std::cout << r.dump(2) << "\n";
    return kOk;
  }
  std::cout << r.at("initial").get<std::string>() << "\n"
            << "step  rule  dt  clock  constraint\n"
            << r.at("traceText").get<std::string>() << "\n"
            << r.at("final").get<std::string>();
  return kOk;
}

int cmd_check(const Common& c, const std::string& reach, const std::string& safety, std::size_t max_states,
              std::size_t solutions) {
  ModelHandle h;
  if (auto st = plcnet_model_load(c.scenario.c_str(), &h.m)) return report_error(st);
  plcnet_options o = c.options();
  if (!reach.empty()) o.reach = reach.c_str();
  if (!safety.empty()) o.safety = safety.c_str();
  o.max_states = max_states;
  o.max_solutions = solutions;
  Owned out;
  plcnet_verdict v = PLCNET_NO_SOLUTION;
  if (auto st = plcnet_check(h.m, &o, &v, &out.p)) return report_error(st);
  json r = json::parse(out.str());
  const json& opt = r.at("options");
  bool has_property = opt.contains("property");
  bool safety_kind = has_property && opt.at("property").at("kind") == "safety";

  if (c.json_out) {
    std::cout << r.dump(2) << "\n";
  } else {
    if (has_property)
      std::cout << opt.at("property").at("kind").get<std::string>() << " "
                << opt.at("property").at("predicate").get<std::string>() << "\n";
    std::size_t n = 0;
    for (const auto& s : r.at("solutions")) {
      std::cout << (safety_kind ? "Counterexample " : "Solution ") << ++n << "\n";
      for (const auto& [k, val] : s.at("valuation").items()) std::cout << "  " << k << " --> " << val.get<std::string>() << "\n";
      std::cout << "step  rule  dt  clock  constraint\n" << s.at("traceText").get<std::string>();
    }
    if (v == PLCNET_NO_SOLUTION) std::cout << "No solution.\n";
    if (v == PLCNET_BOUND_EXHAUSTED) std::cout << "State limit reached before the search completed.\n";
    for (const auto& d : r.at("diagnostics")) std::cout << "diagnostic: " << d.get<std::string>() << "\n";
    std::cout << stats_line(r.at("stats")) << "\n";
    if (v == PLCNET_NO_SOLUTION && r.at("stats").at("unknowns").get<int>() > 0)
      std::cout << "warning: the solver returned unknown; the result is not a proof\n";
  }
  if (!has_property) return v == PLCNET_BOUND_EXHAUSTED ? kViolated : kOk;
  if (safety_kind) return v == PLCNET_NO_SOLUTION ? kOk : kViolated;
  return v == PLCNET_SOLUTION_FOUND ? kOk : kViolated;
}

int cmd_stats(const Common& c, bool compare, bool csv, const std::string& reach, const std::string& safety) {
  ModelHandle h;
  if (auto st = plcnet_model_load(c.scenario.c_str(), &h.m)) return report_error(st);
  plcnet_options o = c.options();
  if (!reach.empty()) o.reach = reach.c_str();
  if (!safety.empty()) o.safety = safety.c_str();
  Owned out;
  if (auto st = plcnet_stats(h.m, &o, compare ? 1 : 0, &out.p)) return report_error(st);
  json r = json::parse(out.str());
  if (c.json_out) {
    std::cout << r.dump(2) << "\n";
  } else if (csv) {
    std::cout << "por,clockSep,verdict,states,transitions,smtTotal,smtEnv,unknowns,seconds\n";
    for (const auto& row : r.at("rows")) {
      const json& s = row.at("stats");
      std::cout << (row.at("por").get<bool>() ? "on" : "off") << "," << (row.at("clockSep").get<bool>() ? "on" : "off")
                << "," << row.at("verdict").get<std::string>() << "," << s.at("states") << "," << s.at("transitions") << ","
                << s.at("smtQueries").at("total") << "," << s.at("smtQueries").at("env") << "," << s.at("unknowns") << ","
                << s.at("seconds") << "\n";
    }
  } else {
    std::cout << std::left << std::setw(6) << "por" << std::setw(10) << "clockSep" << std::setw(16) << "verdict"
              << std::right << std::setw(10) << "states" << std::setw(13) << "transitions" << std::setw(8) << "smt"
              << std::setw(8) << "env" << std::setw(10) << "seconds" << "\n";
    for (const auto& row : r.at("rows")) {
      const json& s = row.at("stats");
      std::cout << std::left << std::setw(6) << (row.at("por").get<bool>() ? "on" : "off") << std::setw(10)
                << (row.at("clockSep").get<bool>() ? "on" : "off") << std::setw(16) << row.at("verdict").get<std::string>()
                << std::right << std::setw(10) << s.at("states").get<long>() << std::setw(13)
                << s.at("transitions").get<long>() << std::setw(8) << s.at("smtQueries").at("total").get<long>()
                << std::setw(8) << s.at("smtQueries").at("env").get<long>() << std::setw(10) << std::fixed
                << std::setprecision(3) << s.at("seconds").get<double>() << "\n";
    }
    if (!r.at("verdictsAgree").get<bool>()) std::cout << "verdicts differ across the grid\n";
  }
  return r.at("verdictsAgree").get<bool>() ? kOk : kViolated;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounded reachability analysis and simulation of networked PLCs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(plcnet_version()));

  std::vector<std::string> files;
  bool parse_json = false;
  auto* parse = app.add_subcommand("parse", "parse and elaborate ST sources");
  parse->add_option("files", files, "ST files")->required()->check(CLI::ExistingFile);
  parse->add_flag("--json", parse_json, "machine-readable output");

  Common sim_c;
  std::string until;
  std::size_t steps = 0;
  auto* sim = app.add_subcommand("simulate", "deterministic concrete run");
  sim_c.add(sim);
  sim->add_option("--until", until, "stop when the clock reaches this time");
  sim->add_option("--steps", steps, "maximum number of steps");

  Common chk_c;
  std::string reach, safety;
  std::size_t max_states = 0, solutions = 1;
  auto* chk = app.add_subcommand("check", "bounded search for the scenario property");
  chk_c.add(chk);
  auto* r_opt = chk->add_option("--reach", reach, "reach predicate, e.g. \"T1.level < 2 OR clock > 5\"");
  chk->add_option("--safety", safety, "safety invariant")->excludes(r_opt);
  chk->add_option("--max-states", max_states, "stop after this many states");
  chk->add_option("--solutions", solutions, "number of solutions to report");

  Common st_c;
  bool compare = false, csv = false;
  std::string st_reach, st_safety;
  auto* stats = app.add_subcommand("stats", "state counts with and without reduction");
  st_c.add(stats);
  stats->add_flag("--compare", compare, "also vary clock separation");
  stats->add_flag("--csv", csv, "CSV output");
  auto* sr_opt = stats->add_option("--reach", st_reach, "reach predicate");
  stats->add_option("--safety", st_safety, "safety invariant")->excludes(sr_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  for (Common* c : {&sim_c, &chk_c, &st_c}) {
    CLI::App* owner = c == &sim_c ? sim : c == &chk_c ? chk : stats;
    c->solver_given = owner->count("--solver") > 0;
  }

  if (*parse) return cmd_parse(files, parse_json);
  if (*sim) return cmd_simulate(sim_c, until, steps);
  if (*chk) return cmd_check(chk_c, reach, safety, max_states, solutions);
  if (*stats) return cmd_stats(st_c, compare, csv, st_reach, st_safety);
  return kUsage;
}
