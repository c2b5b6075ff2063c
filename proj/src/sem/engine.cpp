#include "sem/engine.hpp"

#include <sstream>

namespace plcnet::sem {

using model::Machine;
using model::MachineDef;

const char* class_name(TransitionClass c) {
  switch (c) {
    case TransitionClass::Start: return "start";
    case TransitionClass::Tick: return "tick";
    case TransitionClass::Internal: return "internal";
    case TransitionClass::Comm: return "comm";
  }
  return "?";
}

std::string TransitionId::str(const Model& m) const {
  std::string s = label;
  if (machine >= 0) s += "(" + m.machines[static_cast<std::size_t>(machine)].id + ")";
  if (!detail.empty()) s += "[" + detail + "]";
  return s;
}

Poly elapsed_in_cycle(const MachineDef& def, const Machine& mc) { return Poly(def.cycle_time) - mc.timer; }

Engine::Engine(const Model& m, sym::Solver& solver, EngineOptions opts) : m_(m), solver_(solver), opts_(std::move(opts)) {}

sym::QueryClass Engine::classify_guard(const SystemState& s, const Formula& g, sym::QueryClass qc) const {
  if (qc != sym::QueryClass::Path) return qc;
  std::set<sym::VarId> gv, env;
  g.collect_vars(gv);
  for (const auto& mc : s.machines) {
    for (const auto& v : mc.state) exec::collect_vars(v, env);
    for (const auto& v : mc.cycle_state) exec::collect_vars(v, env);
  }
  for (auto v : gv)
    if (env.count(v)) return sym::QueryClass::Env;
  return qc;
}

bool Engine::assume(SystemState& s, const Formula& g, sym::QueryClass qc) {
  if (g.is_true()) return true;
  if (g.is_false()) return false;
  Formula phi = s.constraint && g;
  if (phi.is_false()) return false;
  // unknown counts as feasible: pruning happens only on unsat
  if (solver_.check(phi, classify_guard(s, g, qc)) == sym::SatResult::Unsat) return false;
  s.constraint = phi;
  return true;
}

namespace {

Transition make(const SystemState& next, std::string label, int machine, TransitionClass cls, std::string detail = {}) {
  Transition t;
  t.id = TransitionId{std::move(label), machine, std::move(detail)};
  t.cls = cls;
  t.next = next;
  t.next.last_tick = false;
  return t;
}

}  // namespace

Expansion Engine::expand(const SystemState& s) {
  Expansion out = expand_untimed(s);
  add_timed(s, out);
  return out;
}

Expansion Engine::expand_untimed(const SystemState& s) {
  Expansion out;
  if (s.bound_reached) return out;
  for (std::size_t i = 0; i < s.machines.size(); ++i)
    if (!s.machines[i].proc.k.empty()) internal_steps(s, static_cast<int>(i), out);
  start_steps(s, out);
  return out;
}

void Engine::add_timed(const SystemState& s, Expansion& out) {
  if (s.bound_reached) return;
  tick_steps(s, out);
  if (opts_.clock_sep) env_tick_steps(s, out);
}

void Engine::internal_steps(const SystemState& s, int i, Expansion& out) {
  const MachineDef& def = m_.machines[static_cast<std::size_t>(i)];
  const Machine& mc = s.machines[static_cast<std::size_t>(i)];
  exec::StepResult r = exec::step(mc.proc);
  switch (r.kind) {
    case exec::StepResult::Kind::Done: return;
    case exec::StepResult::Kind::Internal: {
      Transition t = make(s, r.label, i, TransitionClass::Internal);
      t.next.machines[static_cast<std::size_t>(i)].proc = std::move(r.next);
      t.back_edge = r.back_edge;
      out.transitions.push_back(std::move(t));
      return;
    }
    case exec::StepResult::Kind::Branch: {
      for (bool side : {true, false}) {
        Formula g = side ? r.cond : !r.cond;
        SystemState ns = s;
        if (!assume(ns, g, sym::QueryClass::Path)) continue;
        Transition t = make(ns, r.label + (side ? "-true" : "-false"), i, TransitionClass::Internal);
        t.next.machines[static_cast<std::size_t>(i)].proc = side ? r.next : r.other;
        t.added = g;
        t.back_edge = side && r.back_edge;
        out.transitions.push_back(std::move(t));
      }
      return;
    }
    case exec::StepResult::Kind::AssertTime: {
      Poly el = elapsed_in_cycle(def, mc);
      Formula g = Formula::le(Poly(r.annot.min), el) && Formula::le(el, Poly(r.annot.max));
      SystemState ns = s;
      if (assume(ns, g, sym::QueryClass::Path)) {
        Transition t = make(ns, "assertTime", i, TransitionClass::Internal);
        t.next.machines[static_cast<std::size_t>(i)].proc = std::move(r.next);
        t.added = g;
        out.transitions.push_back(std::move(t));
      } else {
        Formula late = s.constraint && Formula::le(el, Poly(r.annot.max));
        bool missed = late.is_false() ||
                      (!late.is_true() && solver_.check(late, sym::QueryClass::Path) == sym::SatResult::Unsat);
        if (missed)
          out.diagnostics.push_back("assertion window missed: " + def.id + " line " + std::to_string(r.stmt->pos.line) +
                                    " expects " + to_string(r.annot.min) + ".." + to_string(r.annot.max) +
                                    " after cycle start");
      }
      return;
    }
    case exec::StepResult::Kind::Delay: {
      int a = m_.machine_index(r.annot.src), b = m_.machine_index(r.annot.dst);
      int ci = (a < 0 || b < 0) ? -1 : m_.conn_index(a, b);
      if (ci < 0) throw EngineError("//delay names " + r.annot.src + " and " + r.annot.dst + ", which have no connection");
      Transition t = make(s, "delaySet", i, m_.flags.delay_set_internal ? TransitionClass::Internal : TransitionClass::Comm);
      t.next.machines[static_cast<std::size_t>(i)].proc = std::move(r.next);
      t.next.conns[static_cast<std::size_t>(ci)].dmin = r.annot.min;
      t.next.conns[static_cast<std::size_t>(ci)].dmax = r.annot.max;
      out.transitions.push_back(std::move(t));
      return;
    }
    case exec::StepResult::Kind::NeedsComm: comm_steps(s, i, r.comm, out); return;
    case exec::StepResult::Kind::Error: out.diagnostics.push_back("runtime error in " + def.id + ": " + r.error); return;
  }
}

void Engine::start_steps(const SystemState& s, Expansion& out) {
  for (int i : m_.by_iota()) {
    const Machine& mc = s.machines[static_cast<std::size_t>(i)];
    if (!exec::is_cycle_complete(mc.proc)) continue;
    if (opts_.clock_sep && mc.env_timer != 0) continue;
    SystemState ns = s;
    Formula g = Formula::eq(mc.timer, Poly());
    if (!assume(ns, g, sym::QueryClass::Path)) continue;

    // one successor per combination of free input values
    const auto& def = m_.machines[static_cast<std::size_t>(i)];
    std::vector<const model::InputSpec*> free;
    for (const auto& in : def.inputs)
      if (in.free) free.push_back(&in);
    std::vector<std::size_t> pick(free.size(), 0);
    for (;;) {
      Transition t = make(ns, "start", i, TransitionClass::Start);
      t.added = g;
      std::ostringstream detail;
      std::vector<exec::Value> choice;
      for (std::size_t f = 0; f < free.size(); ++f) {
        choice.push_back(free[f]->values[pick[f]]);
        detail << (f ? "," : "") << def.id << "." << free[f]->name << "=" << exec::value_str(choice.back());
      }
      model::begin_cycle(def, t.next.machines[static_cast<std::size_t>(i)], choice);
      t.id.detail = detail.str();
      out.transitions.push_back(std::move(t));
      std::size_t f = 0;
      while (f < free.size() && ++pick[f] == free[f]->values.size()) pick[f++] = 0;
      if (f == free.size()) break;
    }
  }
}

Formula Engine::predicate(const SystemState& s, const st::Expr& e) const {
  struct Eval {
    const Model& m;
    const SystemState& s;
    exec::Value operator()(const st::Expr& e) const {
      switch (e.kind) {
        case st::Expr::Kind::Bool: return e.b;
        case st::Expr::Kind::Num: return Poly(e.num);
        case st::Expr::Kind::Str: return e.name;
        case st::Expr::Kind::Var: return s.machines.empty() ? Poly() : s.machines.front().clock;
        case st::Expr::Kind::Field: {
          int mi = m.machine_index(e.name);
          const auto& def = m.machines[static_cast<std::size_t>(mi)];
          return s.machines[static_cast<std::size_t>(mi)].state[static_cast<std::size_t>(def.key_index(e.field))];
        }
        case st::Expr::Kind::Unary: {
          exec::Value v = (*this)(*e.args[0]);
          if (e.name == "NOT") return exec::normalize(!exec::as_formula(v));
          return -exec::as_poly(v);
        }
        case st::Expr::Kind::Binary: {
          exec::Value a = (*this)(*e.args[0]), b = (*this)(*e.args[1]);
          const std::string& op = e.name;
          if (op == "AND") return exec::normalize(exec::as_formula(a) && exec::as_formula(b));
          if (op == "OR") return exec::normalize(exec::as_formula(a) || exec::as_formula(b));
          if (op == "=" || op == "<>" || op == "XOR") {
            Formula eq;
            if (std::holds_alternative<Poly>(a) && std::holds_alternative<Poly>(b)) {
              eq = Formula::eq(std::get<Poly>(a), std::get<Poly>(b));
            } else if (std::holds_alternative<std::string>(a) || std::holds_alternative<std::string>(b)) {
              eq = Formula::boolean(exec::value_equal(a, b));
            } else {
              Formula x = exec::as_formula(a), y = exec::as_formula(b);
              eq = (x && y) || (!x && !y);
            }
            return exec::normalize(op == "=" ? eq : !eq);
          }
          const Poly& x = exec::as_poly(a);
          const Poly& y = exec::as_poly(b);
          if (op == "+") return x + y;
          if (op == "-") return x - y;
          if (op == "*") return x * y;
          if (op == "/") {
            if (!y.is_constant() || y.is_zero()) throw std::runtime_error("predicate: division by a non-constant or zero");
            return x.scaled(1 / y.constant_value());
          }
          if (op == "<") return exec::normalize(Formula::lt(x, y));
          if (op == "<=") return exec::normalize(Formula::le(x, y));
          if (op == ">") return exec::normalize(Formula::gt(x, y));
          if (op == ">=") return exec::normalize(Formula::ge(x, y));
          throw std::runtime_error("predicate: unsupported operator " + op);
        }
        default: throw std::runtime_error("predicate: unsupported expression");
      }
    }
  };
  return exec::as_formula(Eval{m_, s}(e));
}

}  // namespace plcnet::sem
