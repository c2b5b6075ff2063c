#include "explore/explore.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace plcnet::explore {

using exec::Value;
using sem::Transition;
using sem::TransitionClass;
using sym::Formula;

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::SolutionFound: return "SolutionFound";
    case Verdict::NoSolution: return "NoSolution";
    case Verdict::BoundExhausted: return "BoundExhausted";
  }
  return "?";
}

Formula query_formula(const Engine& e, const SystemState& s, const model::Property& p) {
  Formula f = e.predicate(s, *p.expr);
  return p.kind == model::Property::Kind::Reach ? f : !f;
}

SystemState instantiate(const SystemState& s, const std::map<sym::VarId, Poly>& sub) {
  SystemState n = s;
  for (auto& mc : n.machines) {
    mc.proc = exec::substitute_vars(mc.proc, sub);
    mc.timer = mc.timer.substitute(sub);
    mc.clock = mc.clock.substitute(sub);
    mc.env_elapsed = mc.env_elapsed.substitute(sub);
    for (auto& v : mc.state) v = exec::substitute(v, sub);
    for (auto& v : mc.cycle_state) v = exec::substitute(v, sub);
  }
  for (auto& c : n.conns)
    for (auto& msg : c.buffer) {
      msg.data = exec::substitute(msg.data, sub);
      msg.min_timer = msg.min_timer.substitute(sub);
      msg.max_timer = msg.max_timer.substitute(sub);
    }
  n.constraint = n.constraint.substitute(sub);
  return n;
}

std::string environment_key(const Model& m, const SystemState& s, std::size_t i) {
  std::ostringstream o;
  const auto& mc = s.machines[i];
  o << m.machines[i].id << "{";
  for (std::size_t k = 0; k < mc.state.size(); ++k) o << m.machines[i].state_keys[k] << "=" << exec::value_str(mc.state[k]) << ";";
  o << "clock=" << mc.clock.str() << "}";
  return o.str();
}

namespace {

const Transition* find(const sem::Expansion& x, const TransitionId& id) {
  for (const auto& t : x.transitions)
    if (t.id == id) return &t;
  return nullptr;
}

TraceStep to_step(const Transition& t) { return TraceStep{t.id, t.cls, t.delta, t.fresh, t.added, t.next}; }

std::set<sym::VarId> all_vars(const SystemState& s) {
  std::set<sym::VarId> vs = model::term_vars(s);
  s.constraint.collect_vars(vs);
  return vs;
}

std::string value_under(const Value& v, const sym::Model& mdl) {
  if (auto* p = std::get_if<Poly>(&v)) {
    try {
      return to_string(p->evaluate(mdl));
    } catch (const std::out_of_range&) {
      return p->str();
    }
  }
  if (auto* f = std::get_if<Formula>(&v)) {
    try {
      return f->evaluate(mdl) ? "TRUE" : "FALSE";
    } catch (const std::out_of_range&) {
      return exec::value_str(v);
    }
  }
  return exec::value_str(v);
}

// Anything but the passage of time that alters a machine's physical state or clock.
bool visible_change(const SystemState& a, const Transition& t) {
  if (t.cls == TransitionClass::Tick) return false;
  for (std::size_t i = 0; i < a.machines.size(); ++i) {
    const auto& before = a.machines[i];
    const auto& after = t.next.machines[i];
    if (!(before.clock == after.clock)) return true;
    for (std::size_t k = 0; k < before.state.size(); ++k)
      if (exec::value_str(before.state[k]) != exec::value_str(after.state[k])) return true;
  }
  return false;
}

struct Node {
  model::CanonicalState cs;
  long parent = -1;
  TransitionId via;
};

}  // namespace

std::optional<Query> scenario_query(const Model& m) {
  if (!m.analysis.property) return std::nullopt;
  return Query{*m.analysis.property};
}

Trace replay(Engine& e, const SystemState& init, const std::vector<TransitionId>& ids) {
  return replay(e, init, ids, {});
}

Trace replay(Engine& e, const SystemState& init, const std::vector<TransitionId>& ids,
             const std::vector<std::string>& keys) {
  Trace tr;
  tr.initial = init;
  SystemState cur = init;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    sem::Expansion x = e.expand(cur);
    const Transition* t = nullptr;
    if (i < keys.size()) {
      for (const auto& c : x.transitions)
        if (c.id.label == ids[i].label && c.id.machine == ids[i].machine &&
            model::canonicalize(e.model(), c.next).key == keys[i]) {
          t = &c;
          break;
        }
    } else {
      t = find(x, ids[i]);
    }
    if (!t) throw ReplayError("step " + std::to_string(i + 1) + ": " + ids[i].str(e.model()) + " is not enabled");
    tr.steps.push_back(to_step(*t));
    cur = t->next;
  }
  return tr;
}

SearchResult search(Engine& e, const SystemState& init, const std::optional<Query>& q, const SearchOptions& opts) {
  const Model& m = e.model();
  auto t0 = std::chrono::steady_clock::now();
  sym::SolverStats before = e.solver().stats();
  SearchResult res;
  std::vector<Node> nodes;
  std::unordered_map<std::string, std::size_t> index;
  std::unordered_set<std::string> diag_seen;
  bool done = false;

  auto note = [&](const std::string& d) {
    if (diag_seen.insert(d).second) res.diagnostics.push_back(d);
  };

  auto check = [&](std::size_t idx) {
    if (!q) return;
    const SystemState& s = nodes[idx].cs.state;
    Formula f = query_formula(e, s, q->property);
    if (f.is_false()) return;
    if (!f.is_true() || !s.constraint.is_true()) {
      if (e.solver().check(s.constraint && f, sym::QueryClass::Property) != sym::SatResult::Sat) return;
    }
    std::vector<TransitionId> ids;
    std::vector<std::string> keys;
    for (long k = static_cast<long>(idx); nodes[static_cast<std::size_t>(k)].parent >= 0;
         k = nodes[static_cast<std::size_t>(k)].parent) {
      ids.push_back(nodes[static_cast<std::size_t>(k)].via);
      keys.push_back(nodes[static_cast<std::size_t>(k)].cs.key);
    }
    std::reverse(ids.begin(), ids.end());
    std::reverse(keys.begin(), keys.end());
    Solution sol;
    sol.state_index = idx;
    sol.trace = replay(e, init, ids, keys);
    const SystemState& last = sol.trace.steps.empty() ? init : sol.trace.steps.back().state;
    Formula fr = query_formula(e, last, q->property);
    sym::Model mdl;
    if (e.solver().check(last.constraint && fr, sym::QueryClass::Property, &mdl, all_vars(last)) == sym::SatResult::Sat)
      sol.trace.witness = mdl;
    for (std::size_t i = 0; i < last.machines.size(); ++i) {
      const auto& def = m.machines[i];
      for (std::size_t k = 0; k < def.state_keys.size(); ++k)
        sol.valuation[def.id + "." + def.state_keys[k]] = value_under(last.machines[i].state[k], mdl);
    }
    if (!last.machines.empty()) sol.valuation["clock"] = value_under(last.machines.front().clock, mdl);
    res.solutions.push_back(std::move(sol));
    if (res.solutions.size() >= q->max_solutions) done = true;
  };

  auto insert = [&](model::CanonicalState cs, long parent, const TransitionId& via) -> std::optional<std::size_t> {
    auto [it, fresh] = index.emplace(cs.key, nodes.size());
    if (!fresh) return std::nullopt;
    nodes.push_back(Node{std::move(cs), parent, via});
    return it->second;
  };

  model::CanonicalState c0 = model::canonicalize(m, init);
  std::vector<std::size_t> frontier;
  if (c0.state.bound_reached) {
    ++res.stats.bound_hits;
  } else {
    frontier.push_back(*insert(std::move(c0), -1, {}));
    check(0);
  }
  bool truncated = false;

  while (!frontier.empty() && !done) {
    std::vector<std::size_t> next;
    for (std::size_t idx : frontier) {
      if (done) break;
      if (opts.max_states && nodes.size() >= opts.max_states) {
        truncated = true;
        break;
      }
      const SystemState cur = nodes[idx].cs.state;
      // with reduction, time steps are generated only when no other step is
      // enabled or a cycle forces full expansion
      sem::Expansion x = opts.por ? e.expand_untimed(cur) : e.expand(cur);
      bool timed = !opts.por;
      if (!timed && x.transitions.empty()) {
        e.add_timed(cur, x);
        timed = true;
      }
      for (const auto& d : x.diagnostics) note(d);
      auto& ts = x.transitions;
      if (ts.empty()) {
        ++res.stats.deadlocks;
        for (std::size_t i = 0; i < cur.machines.size(); ++i) {
          const auto& mc = cur.machines[i];
          if (mc.timer.is_zero() && !exec::is_cycle_complete(mc.proc))
            note("cycle overrun: " + m.machines[i].id + " reached the end of its cycle with its programs unfinished");
        }
        continue;
      }
      if (opts.collect_endpoints)
        for (const auto& t : ts) {
          if (t.cls != TransitionClass::Start) continue;
          // a machine is at its cycle endpoint when this start restarts it
          for (std::size_t i = 0; i < cur.machines.size(); ++i)
            if (!(t.next.machines[i].timer == cur.machines[i].timer)) res.endpoints.insert(environment_key(m, cur, i));
        }

      std::vector<std::size_t> amp;
      if (opts.por) {
        amp = por::ample(m, x);
      } else {
        for (std::size_t k = 0; k < ts.size(); ++k) amp.push_back(k);
      }
      std::vector<std::optional<model::CanonicalState>> canon(ts.size());
      auto canon_of = [&](std::size_t k) -> const model::CanonicalState& {
        if (!canon[k]) canon[k] = model::canonicalize(m, ts[k].next);
        return *canon[k];
      };
      if (amp.size() < ts.size() || !timed) {
        std::unordered_set<std::size_t> path;
        for (long k = static_cast<long>(idx); k >= 0; k = nodes[static_cast<std::size_t>(k)].parent)
          path.insert(static_cast<std::size_t>(k));
        std::vector<bool> on_path(ts.size(), false);
        bool cycle = false;
        for (std::size_t k : amp) {
          auto it = index.find(canon_of(k).key);
          on_path[k] = it != index.end() && path.count(it->second);
          cycle = cycle || on_path[k] || ts[k].back_edge;
        }
        if (cycle && !timed) {
          std::size_t before = ts.size();
          e.add_timed(cur, x);
          on_path.resize(ts.size(), false);
          canon.resize(ts.size());
          timed = before != ts.size();
        }
        if (amp.size() < ts.size() && por::needs_full_expansion(x, amp, on_path)) {
          ++res.stats.full_expansions;
          amp.clear();
          for (std::size_t k = 0; k < ts.size(); ++k) amp.push_back(k);
        } else {
          ++res.stats.reduced;
        }
      }

      for (std::size_t k : amp) {
        ++res.stats.transitions;
        if (ts[k].id.label == "envTick") ++res.stats.env_ticks;
        if (opts.check_invisibility && visible_change(cur, ts[k])) {
          ++res.stats.invisibility_violations;
          if (amp.size() < ts.size()) ++res.stats.reduced_visible;
          note("visible non-time step: " + ts[k].id.str(m));
        }
        if (ts[k].next.bound_reached) {
          ++res.stats.bound_hits;
          continue;
        }
        auto added = insert(canon_of(k), static_cast<long>(idx), ts[k].id);
        if (!added) continue;
        next.push_back(*added);
        check(*added);
        if (done) break;
      }
    }
    if (truncated) break;
    std::sort(next.begin(), next.end(), [&](std::size_t a, std::size_t b) {
      const auto& ka = nodes[a].cs;
      const auto& kb = nodes[b].cs;
      return ka.hash != kb.hash ? ka.hash < kb.hash : ka.key < kb.key;
    });
    frontier = std::move(next);
  }

  res.stats.states = nodes.size();
  const sym::SolverStats& after = e.solver().stats();
  for (std::size_t c = 0; c < sym::kQueryClasses; ++c) res.stats.solver.queries[c] = after.queries[c] - before.queries[c];
  res.stats.solver.trivial = after.trivial - before.trivial;
  res.stats.solver.external_calls = after.external_calls - before.external_calls;
  res.stats.solver.unknown = after.unknown - before.unknown;
  res.stats.unknowns = res.stats.solver.unknown;
  res.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!res.solutions.empty()) {
    res.verdict = Verdict::SolutionFound;
  } else if (truncated) {
    res.verdict = Verdict::BoundExhausted;
  } else {
    res.verdict = Verdict::NoSolution;
  }
  return res;
}

Grid stats_compare(const Model& m, sym::Solver& solver, const std::optional<Query>& q, const SearchOptions& base) {
  Grid g;
  for (bool clock_sep : {false, true})
    for (bool por : {false, true}) {
      Model mm = m;
      mm.analysis.clock_sep = clock_sep;
      mm.analysis.por = por;
      Engine e(mm, solver, sem::EngineOptions::from(mm));
      SearchOptions o = base;
      o.por = por;
      GridRow row{por, clock_sep, search(e, model::initial_state(mm), q, o)};
      if (!g.rows.empty() && row.result.verdict != g.rows.front().result.verdict) g.verdicts_agree = false;
      g.rows.push_back(std::move(row));
    }
  return g;
}

namespace {

bool success_outcome(const std::string& label) {
  return label != "conFail" && label != "sendDataFail" && label != "rcvFail" && label != "rcvNo";
}

Rational clock_of(const SystemState& s) { return s.machines.empty() ? Rational(0) : s.machines.front().clock.constant_value(); }

}  // namespace

Trace simulate(Engine& e, const SystemState& init, const SimOptions& opts) {
  const Model& m = e.model();
  Trace tr;
  tr.initial = init;
  SystemState cur = init;
  for (std::size_t n = 0; n < opts.max_steps && !cur.bound_reached; ++n) {
    sem::Expansion x = e.expand(cur);
    const auto& ts = x.transitions;
    const Transition* pick = nullptr;
    for (const auto& t : ts)
      if (!pick && t.cls == TransitionClass::Start) pick = &t;
    if (!pick) {
      for (const auto& t : ts)
        if (t.cls == TransitionClass::Internal &&
            (!pick || m.iota[static_cast<std::size_t>(t.id.machine)] < m.iota[static_cast<std::size_t>(pick->id.machine)]))
          pick = &t;
    }
    if (!pick) {
      for (const auto& t : ts)
        if (t.cls == TransitionClass::Comm && success_outcome(t.id.label)) {
          pick = &t;
          break;
        }
      for (const auto& t : ts)
        if (!pick && t.cls == TransitionClass::Comm) pick = &t;
    }
    if (pick) {
      tr.steps.push_back(to_step(*pick));
      cur = pick->next;
      continue;
    }
    // only time can pass
    std::optional<Rational> d;
    for (const auto& t : ts)
      if (t.cls == TransitionClass::Tick) {
        Rational v = t.next.machines.empty() ? Rational(0) : clock_of(t.next) - clock_of(cur);
        if (t.next.bound_reached) v = *e.mte(cur).value;
        if (!d || v < *d) d = v;
      }
    if (!d) break;
    if (opts.until) {
      Rational left = *opts.until - clock_of(cur);
      if (left <= 0) break;
      if (*d > left) d = left;
    }
    TraceStep st;
    st.id = TransitionId{"tick", -1, to_string(*d)};
    st.cls = TransitionClass::Tick;
    st.delta = to_string(*d);
    st.state = e.apply_bound(e.tick(cur, Poly(*d)));
    cur = st.state;
    tr.steps.push_back(std::move(st));
  }
  return tr;
}

Trace random_walk(Engine& e, const SystemState& init, std::size_t steps, std::mt19937_64& rng) {
  Trace tr;
  tr.initial = init;
  SystemState cur = init;
  for (std::size_t n = 0; n < steps && !cur.bound_reached; ++n) {
    sem::Expansion x = e.expand(cur);
    if (x.transitions.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, x.transitions.size() - 1);
    const Transition& t = x.transitions[pick(rng)];
    tr.steps.push_back(to_step(t));
    cur = t.next;
  }
  return tr;
}

namespace {

// Concrete view of a state for comparison: drops bookkeeping that only one mode keeps.
std::string concrete_key(const Model& m, SystemState s, bool clock_sep) {
  s.constraint = Formula();
  s.next_var = 0;
  s.last_tick = false;
  if (!clock_sep)
    for (auto& mc : s.machines) mc.env_timer = 0;
  // concrete ticks stop a minimum delay at zero, symbolic ones let it go negative
  for (auto& c : s.conns)
    for (auto& msg : c.buffer)
      if (msg.min_timer.is_constant() && msg.min_timer.constant_value() < 0) msg.min_timer = Poly();
  return model::canonicalize(m, s).key;
}

}  // namespace

std::optional<std::string> embed(Engine& symbolic, const SystemState& init, const Trace& concrete) {
  const Model& m = symbolic.model();
  bool clock_sep = symbolic.options().clock_sep;
  std::map<sym::VarId, Poly> sub;
  SystemState s = init;
  const auto& cs = concrete.steps;
  auto fail = [&](std::size_t i, const std::string& why) { return "step " + std::to_string(i + 1) + ": " + why; };

  for (std::size_t i = 0; i < cs.size();) {
    const SystemState& before = i == 0 ? concrete.initial : cs[i - 1].state;
    sem::Expansion x = symbolic.expand(s);
    if (cs[i].id.label == "tick") {
      std::size_t j = i;
      while (j < cs.size() && cs[j].id.label == "tick") ++j;
      const SystemState& after = cs[j - 1].state;
      Rational total = after.bound_reached ? Rational(0) : clock_of(after) - clock_of(before);
      if (after.bound_reached) {
        for (std::size_t k = i; k < j; ++k) total += parse_rational(cs[k].delta);
      }
      const Transition* t = nullptr;
      for (const auto& c : x.transitions)
        if (c.id.label == "tick") t = &c;
      if (!t || !t->fresh) return fail(i, "no symbolic tick is enabled");
      sub[*t->fresh] = Poly(total);
      SystemState n = instantiate(t->next, sub);
      if (after.bound_reached) {
        if (!t->next.bound_reached && !n.constraint.is_false()) {
          // the symbolic tick may also stop at the bound; the concrete walk went past it
          if (clock_of(n) <= *symbolic.options().bound) return fail(i, "concrete run passed the bound, symbolic did not");
        }
        return std::nullopt;
      }
      if (!n.constraint.is_true()) return fail(i, "tick of " + to_string(total) + " violates the path constraint");
      if (concrete_key(m, n, clock_sep) != concrete_key(m, after, clock_sep)) return fail(i, "states differ after tick");
      s = t->next;
      i = j;
      continue;
    }
    const SystemState& after = cs[i].state;
    const Transition* match = nullptr;
    for (const auto& c : x.transitions) {
      if (c.id.label != cs[i].id.label || c.id.machine != cs[i].id.machine) continue;
      SystemState n = instantiate(c.next, sub);
      if (!n.constraint.is_true()) continue;
      if (after.bound_reached ? n.bound_reached : concrete_key(m, n, clock_sep) == concrete_key(m, after, clock_sep)) {
        match = &c;
        break;
      }
    }
    if (!match) return fail(i, "no symbolic counterpart for " + cs[i].id.str(m));
    s = match->next;
    ++i;
  }
  return std::nullopt;
}

namespace {

struct Row {
  std::string step, rule, dt, clock, added;
};

std::vector<Row> rows_of(const Model& m, const Trace& t) {
  auto show = [&](const Poly& p) -> std::string {
    if (p.is_constant() || !t.witness) return p.str();
    try {
      return to_string(p.evaluate(*t.witness));
    } catch (const std::out_of_range&) {
      return p.str();
    }
  };
  std::vector<Row> rows;
  const SystemState& s0 = t.initial;
  rows.push_back({"0", "init", "-", s0.machines.empty() ? "0" : show(s0.machines.front().clock), s0.constraint.str()});
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const TraceStep& st = t.steps[i];
    Row r;
    r.step = std::to_string(i + 1);
    r.rule = st.id.str(m);
    if (st.delta.empty()) {
      r.dt = "-";
    } else if (st.fresh && t.witness && t.witness->count(*st.fresh)) {
      r.dt = st.delta + "=" + to_string(t.witness->at(*st.fresh));
    } else {
      r.dt = st.delta;
    }
    if (st.state.bound_reached) {
      r.clock = "boundReached";
    } else {
      r.clock = st.state.machines.empty() ? "0" : show(st.state.machines.front().clock);
    }
    r.added = st.added.is_true() ? "-" : st.added.str();
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

std::string trace_text(const Model& m, const Trace& t) {
  std::ostringstream o;
  for (const Row& r : rows_of(m, t)) o << r.step << "  " << r.rule << "  " << r.dt << "  " << r.clock << "  " << r.added << "\n";
  return o.str();
}

std::string trace_json(const Model& m, const Trace& t) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Row& r : rows_of(m, t))
    arr.push_back({{"step", std::stoi(r.step)}, {"rule", r.rule}, {"dt", r.dt}, {"clock", r.clock}, {"constraint", r.added}});
  return arr.dump(2);
}

}  // namespace plcnet::explore
