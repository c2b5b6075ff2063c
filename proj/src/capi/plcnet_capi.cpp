#include "plcnet/plcnet.h"

#include "explore/explore.hpp"
#include "model/scenario.hpp"
#include "st/elaborate.hpp"
#include "st/parser.hpp"

#include "json.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

using nlohmann::json;
using namespace plcnet;

struct plcnet_model {
  model::Model m;
};

namespace {

thread_local std::string g_error;

plcnet_status fail(plcnet_status st, const std::string& msg) {
  g_error = msg;
  return st;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

// Runs `f`, mapping exceptions onto status codes.
template <class F>
plcnet_status guarded(F&& f) {
  try {
    g_error.clear();
    return f();
  } catch (const st::SourceError& e) {
    return fail(PLCNET_E_SOURCE, e.what());
  } catch (const model::ScenarioError& e) {
    return fail(PLCNET_E_SCENARIO, e.what());
  } catch (const sem::EngineError& e) {
    return fail(PLCNET_E_ENGINE, e.what());
  } catch (const explore::ReplayError& e) {
    return fail(PLCNET_E_ENGINE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(PLCNET_E_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(PLCNET_E_ENGINE, e.what());
  }
}

Rational rational_arg(const char* text, const char* what) {
  try {
    return plcnet::parse_rational(text);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string(what) + ": " + e.what());
  }
}

// The scenario with the caller's overrides applied.
model::Model configured(const plcnet_model* h, const plcnet_options* o) {
  model::Model m = h->m;
  if (!o) return m;
  if (o->symbolic != PLCNET_DEFAULT) m.analysis.mode = o->symbolic ? model::Mode::Symbolic : model::Mode::Concrete;
  if (o->por != PLCNET_DEFAULT) m.analysis.por = o->por != 0;
  if (o->clock_sep != PLCNET_DEFAULT) m.analysis.clock_sep = o->clock_sep != 0;
  if (o->bound) m.analysis.bound = rational_arg(o->bound, "bound");
  if (o->reach && o->safety) throw std::invalid_argument("give either a reach predicate or a safety invariant");
  if (o->reach) m.analysis.property = model::parse_property(m, o->reach, model::Property::Kind::Reach);
  if (o->safety) m.analysis.property = model::parse_property(m, o->safety, model::Property::Kind::Safety);
  return m;
}

sym::SolverOptions solver_options(const plcnet_options* o) {
  sym::SolverOptions so;
  if (o && o->solver) {
    if (*o->solver == '\0') {
      so.backend = sym::Backend::Internal;
    } else {
      so.external_cmd = o->solver;
    }
  }
  return so;
}

json stats_json(const explore::SearchStats& s) {
  json q;
  for (std::size_t c = 0; c < sym::kQueryClasses; ++c)
    q[sym::query_class_name(static_cast<sym::QueryClass>(c))] = s.solver.queries[c];
  q["total"] = s.solver.total();
  q["trivial"] = s.solver.trivial;
  q["external"] = s.solver.external_calls;
  return {{"states", s.states},
          {"transitions", s.transitions},
          {"deadlocks", s.deadlocks},
          {"boundReached", s.bound_hits},
          {"reducedExpansions", s.reduced},
          {"fullExpansions", s.full_expansions},
          {"invisibilityViolations", s.invisibility_violations},
          {"reducedVisible", s.reduced_visible},
          {"envTicks", s.env_ticks},
          {"smtQueries", q},
          {"unknowns", s.unknowns},
          {"seconds", s.seconds}};
}

json options_json(const model::Model& m) {
  json j{{"mode", m.analysis.mode == model::Mode::Symbolic ? "symbolic" : "concrete"},
         {"por", m.analysis.por},
         {"clockSep", m.analysis.clock_sep}};
  j["bound"] = m.analysis.bound ? json(to_string(*m.analysis.bound)) : json(nullptr);
  if (m.analysis.property) {
    j["property"] = {{"kind", m.analysis.property->kind == model::Property::Kind::Reach ? "reach" : "safety"},
                     {"predicate", m.analysis.property->text}};
  }
  return j;
}

std::optional<explore::Query> query_of(const model::Model& m, const plcnet_options* o) {
  auto q = explore::scenario_query(m);
  if (q && o && o->max_solutions) q->max_solutions = o->max_solutions;
  return q;
}

json result_json(const model::Model& m, const explore::SearchResult& r) {
  json sols = json::array();
  for (const auto& s : r.solutions) {
    json w = json::object();
    for (const auto& [k, v] : s.valuation) w[k] = v;
    sols.push_back({{"valuation", w},
                    {"trace", json::parse(explore::trace_json(m, s.trace))},
                    {"traceText", explore::trace_text(m, s.trace)}});
  }
  return {{"verdict", explore::verdict_name(r.verdict)},
          {"solutions", sols},
          {"stats", stats_json(r.stats)},
          {"diagnostics", r.diagnostics}};
}

}  // namespace

extern "C" {

void plcnet_options_init(plcnet_options* o) {
  if (!o) return;
  *o = plcnet_options{PLCNET_DEFAULT, PLCNET_DEFAULT, PLCNET_DEFAULT, nullptr, nullptr, nullptr, nullptr, 0, 0};
}

const char* plcnet_version(void) { return "0.1.0"; }
const char* plcnet_last_error(void) { return g_error.c_str(); }
void plcnet_string_free(char* s) { std::free(s); }

plcnet_status plcnet_parse_files(const char* const* paths, size_t count, char** report) {
  if (!report || (count && !paths)) return fail(PLCNET_E_ARGUMENT, "null argument");
  return guarded([&] {
    json files = json::array(), errors = json::array(), pous = json::array();
    std::vector<st::PouDecl> all;
    for (size_t i = 0; i < count; ++i) {
      std::string path = paths[i];
      std::ifstream in(path);
      if (!in) {
        errors.push_back(path + ": cannot read file");
        continue;
      }
      std::stringstream ss;
      ss << in.rdbuf();
      std::string text = ss.str();
      try {
        auto decls = st::parse_source(text);
        if (decls.empty()) throw st::SourceError(st::Pos{1, 1}, "no program or function block");
        json names = json::array();
        for (auto& d : decls) {
          names.push_back(d.name);
          all.push_back(std::move(d));
        }
        files.push_back({{"path", path}, {"pous", names}});
      } catch (const st::SourceError& e) {
        errors.push_back(path + ":" + e.what());
      }
    }
    if (errors.empty()) {
      try {
        st::PouTable table = st::elaborate_with_builtins(all);
        for (const auto& [name, info] : table)
          pous.push_back({{"name", name}, {"kind", info->decl.kind == st::PouDecl::Kind::Program ? "program" : "function_block"}, {"vars", info->vars.size()},
                          {"while", info->has_while}});
      } catch (const st::SourceError& e) {
        errors.push_back(e.what());
      }
    }
    json rep{{"ok", errors.empty()}, {"files", files}, {"pous", pous}, {"errors", errors}};
    *report = dup(rep.dump(2));
    if (!errors.empty()) return fail(PLCNET_E_SOURCE, errors.front().get<std::string>());
    return PLCNET_OK;
  });
}

plcnet_status plcnet_model_load(const char* path, plcnet_model** out) {
  if (!path || !out) return fail(PLCNET_E_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new plcnet_model{model::load_scenario(path)};
    return PLCNET_OK;
  });
}

plcnet_status plcnet_model_load_text(const char* text, const char* base_dir, plcnet_model** out) {
  if (!text || !out) return fail(PLCNET_E_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new plcnet_model{model::load_scenario_text(text, base_dir ? base_dir : ".")};
    return PLCNET_OK;
  });
}

void plcnet_model_free(plcnet_model* m) { delete m; }

plcnet_status plcnet_model_describe(const plcnet_model* m, char** out) {
  if (!m || !out) return fail(PLCNET_E_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup(model::describe(m->m, model::initial_state(m->m)));
    return PLCNET_OK;
  });
}

plcnet_status plcnet_check(const plcnet_model* h, const plcnet_options* o, plcnet_verdict* verdict, char** result) {
  if (!h || !result) return fail(PLCNET_E_ARGUMENT, "null argument");
  return guarded([&] {
    model::Model m = configured(h, o);
    sym::Solver solver(solver_options(o));
    sem::Engine e(m, solver, sem::EngineOptions::from(m));
    explore::SearchOptions so;
    so.por = m.analysis.por;
    so.max_states = o ? o->max_states : 0;
    explore::SearchResult r = explore::search(e, model::initial_state(m), query_of(m, o), so);
    json j = result_json(m, r);
    j["options"] = options_json(m);
    j["solver"] = solver.has_external() ? solver.external_command() : "internal";
    *result = dup(j.dump(2));
    if (verdict) *verdict = static_cast<plcnet_verdict>(r.verdict);
    return PLCNET_OK;
  });
}

plcnet_status plcnet_simulate(const plcnet_model* h, const plcnet_options* o, const char* until, size_t max_steps,
                              char** result) {
  if (!h || !result) return fail(PLCNET_E_ARGUMENT, "null argument");
  return guarded([&] {
    model::Model m = configured(h, o);
    m.analysis.mode = model::Mode::Concrete;
    sym::Solver solver(solver_options(o));
    sem::Engine e(m, solver, sem::EngineOptions::from(m));
    explore::SimOptions so;
    if (until) so.until = rational_arg(until, "until");
    if (max_steps) so.max_steps = max_steps;
    model::SystemState init = model::initial_state(m);
    explore::Trace t = explore::simulate(e, init, so);
    const model::SystemState& last = t.steps.empty() ? init : t.steps.back().state;
    json j{{"trace", json::parse(explore::trace_json(m, t))},
           {"traceText", explore::trace_text(m, t)},
           {"initial", model::describe(m, init)},
           {"final", model::describe(m, last)},
           {"steps", t.steps.size()}};
    json env = json::object();
    if (!last.bound_reached) {
      for (std::size_t i = 0; i < last.machines.size(); ++i) {
        const auto& def = m.machines[i];
        for (std::size_t k = 0; k < def.state_keys.size(); ++k)
          env[def.id + "." + def.state_keys[k]] = exec::value_str(last.machines[i].state[k]);
        env[def.id + ".timer"] = last.machines[i].timer.str();
      }
      if (!last.machines.empty()) env["clock"] = last.machines.front().clock.str();
    }
    j["environment"] = env;
    *result = dup(j.dump(2));
    return PLCNET_OK;
  });
}

plcnet_status plcnet_stats(const plcnet_model* h, const plcnet_options* o, int grid, char** result) {
  if (!h || !result) return fail(PLCNET_E_ARGUMENT, "null argument");
  return guarded([&] {
    model::Model m = configured(h, o);
    sym::Solver solver(solver_options(o));
    explore::SearchOptions so;
    so.max_states = o ? o->max_states : 0;
    auto q = query_of(m, o);
    json rows = json::array();
    bool agree = true;
    auto add = [&](const explore::GridRow& row) {
      rows.push_back({{"por", row.por},
                      {"clockSep", row.clock_sep},
                      {"verdict", explore::verdict_name(row.result.verdict)},
                      {"stats", stats_json(row.result.stats)}});
    };
    if (grid) {
      explore::Grid g = explore::stats_compare(m, solver, q, so);
      for (const auto& row : g.rows) add(row);
      agree = g.verdicts_agree;
    } else {
      std::optional<explore::Verdict> first;
      for (bool por : {false, true}) {
        model::Model mm = m;
        mm.analysis.por = por;
        sem::Engine e(mm, solver, sem::EngineOptions::from(mm));
        explore::SearchOptions o2 = so;
        o2.por = por;
        explore::GridRow row{por, mm.analysis.clock_sep, explore::search(e, model::initial_state(mm), q, o2)};
        if (first && *first != row.result.verdict) agree = false;
        first = row.result.verdict;
        add(row);
      }
    }
    json j{{"rows", rows}, {"verdictsAgree", agree}, {"options", options_json(m)}};
    *result = dup(j.dump(2));
    return PLCNET_OK;
  });
}

}  // extern "C"
