#include "sem/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace plcnet::sem {

using model::Machine;

namespace {

Rational constant(const Poly& p, const char* what) {
  if (!p.is_constant()) throw std::invalid_argument(std::string("concrete timing needs a constant ") + what);
  return p.constant_value();
}

}  // namespace

TimeBound Engine::mte(const SystemState& s) const {
  TimeBound b = TimeBound::infinity();
  for (const auto& mc : s.machines) b = min(b, TimeBound{constant(mc.timer, "timer")});
  for (const auto& c : s.conns)
    for (const auto& msg : c.buffer) b = min(b, TimeBound{constant(msg.max_timer, "message timer")});
  return b;
}

std::vector<Rational> Engine::tick_menu(const SystemState& s) const {
  TimeBound cap = mte(s);
  std::vector<Rational> cand;
  if (!cap.is_infinite()) cand.push_back(*cap.value);
  for (const auto& mc : s.machines) cand.push_back(constant(mc.timer, "timer"));
  for (const auto& c : s.conns)
    for (const auto& msg : c.buffer) {
      cand.push_back(constant(msg.min_timer, "message timer"));
      cand.push_back(constant(msg.max_timer, "message timer"));
    }
  for (std::size_t i = 0; i < s.machines.size(); ++i) {
    const Machine& mc = s.machines[i];
    if (mc.proc.k.empty()) continue;
    exec::StepResult r = exec::step(mc.proc);
    if (r.kind != exec::StepResult::Kind::AssertTime) continue;
    Rational el = constant(elapsed_in_cycle(m_.machines[i], mc), "timer");
    cand.push_back(r.annot.min - el);
    cand.push_back(r.annot.max - el);
  }
  if (opts_.bound && !s.machines.empty()) {
    // the clock only moves with ticks when the clocks are not separated
    if (!opts_.clock_sep) cand.push_back(*opts_.bound - constant(s.machines.front().clock, "clock"));
  }
  std::vector<Rational> menu;
  for (const auto& d : cand)
    if (d > 0 && (cap.is_infinite() || d <= *cap.value)) menu.push_back(d);
  std::sort(menu.begin(), menu.end());
  menu.erase(std::unique(menu.begin(), menu.end()), menu.end());
  return menu;
}

SystemState Engine::tick(const SystemState& s, const Poly& T) const {
  bool conc = !symbolic();
  if (conc) {
    Rational d = constant(T, "duration");
    TimeBound cap = mte(s);
    if (d < 0 || (!cap.is_infinite() && d > *cap.value)) throw std::invalid_argument("tick beyond the maximal time elapse");
  }
  SystemState n = s;
  for (std::size_t i = 0; i < n.machines.size(); ++i) {
    Machine& mc = n.machines[i];
    mc.timer = conc ? Poly(monus(mc.timer.constant_value(), T.constant_value())) : mc.timer - T;
    if (!opts_.clock_sep) {
      mc.clock = mc.clock + T;
      mc.env_elapsed = mc.env_elapsed + T;
      mc.state = model::eval_flow(m_.machines[i], mc.cycle_state, mc.env_elapsed);
      if (conc) mc.env_timer = monus(mc.env_timer, T.constant_value());
    }
  }
  for (auto& c : n.conns)
    for (auto& msg : c.buffer) {
      msg.min_timer = conc ? Poly(monus(msg.min_timer.constant_value(), T.constant_value())) : msg.min_timer - T;
      msg.max_timer = msg.max_timer - T;
    }
  return n;
}

SystemState Engine::apply_bound(const SystemState& s) {
  if (!opts_.bound || s.machines.empty()) return s;
  const Poly& clock = s.machines.front().clock;
  SystemState n = s;
  if (clock.is_constant()) {
    if (clock.constant_value() > *opts_.bound) n.bound_reached = true;
    return n;
  }
  if (!assume(n, Formula::le(clock, Poly(*opts_.bound)), sym::QueryClass::Bound)) {
    n = s;
    n.bound_reached = true;
  }
  return n;
}

void Engine::tick_steps(const SystemState& s, Expansion& out) {
  if (!symbolic()) {
    for (const auto& d : tick_menu(s)) {
      Transition t;
      t.id = TransitionId{"tick", -1, to_string(d)};
      t.cls = TransitionClass::Tick;
      t.delta = to_string(d);
      t.next = apply_bound(tick(s, Poly(d)));
      t.next.last_tick = false;
      out.transitions.push_back(std::move(t));
    }
    return;
  }
  if (s.last_tick) {
    out.tick_suppressed = true;
    return;
  }
  SystemState n = s;
  sym::VarId v = n.next_var++;
  Poly T = Poly::var(v);
  std::vector<Formula> parts{Formula::gt(T, Poly())};
  for (const auto& mc : s.machines) parts.push_back(Formula::le(T, mc.timer));
  for (const auto& c : s.conns)
    for (const auto& msg : c.buffer) parts.push_back(Formula::le(T, msg.max_timer));
  Formula g = Formula::conj(std::move(parts));
  // a symbolic duration moves the flows, so it is an environment query unless clocks are separated
  if (!assume(n, g, opts_.clock_sep ? sym::QueryClass::Path : sym::QueryClass::Env)) return;
  Transition t;
  t.id = TransitionId{"tick", -1, "sym"};
  t.cls = TransitionClass::Tick;
  t.delta = T.str();
  t.added = g;
  t.fresh = v;
  t.next = apply_bound(tick(n, T));
  t.next.last_tick = true;
  out.transitions.push_back(std::move(t));
}

void Engine::env_tick_steps(const SystemState& s, Expansion& out) {
  TimeBound d = TimeBound::infinity();
  for (const auto& mc : s.machines) d = min(d, TimeBound{mc.env_timer});
  if (d.is_infinite() || *d.value <= 0) return;
  Rational dt = *d.value;
  SystemState n = s;
  n.last_tick = false;
  for (std::size_t i = 0; i < n.machines.size(); ++i) {
    Machine& mc = n.machines[i];
    mc.env_timer -= dt;
    mc.env_elapsed = mc.env_elapsed + Poly(dt);
    mc.clock = mc.clock + Poly(dt);
    mc.state = model::eval_flow(m_.machines[i], mc.cycle_state, mc.env_elapsed);
  }
  Transition t;
  t.id = TransitionId{"envTick", -1, to_string(dt)};
  t.cls = TransitionClass::Tick;
  t.delta = to_string(dt);
  t.next = apply_bound(n);
  out.transitions.push_back(std::move(t));
}

}  // namespace plcnet::sem
