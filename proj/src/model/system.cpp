#include "model/system.hpp"

#include "sym/linear.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace plcnet::model {

int MachineDef::key_index(const std::string& k) const {
  for (std::size_t i = 0; i < state_keys.size(); ++i)
    if (state_keys[i] == k) return static_cast<int>(i);
  return -1;
}

bool MachineDef::is_actuated(int key) const {
  for (const auto& [loc, k] : actuate)
    if (k == key) return true;
  return false;
}

int Model::machine_index(const std::string& id) const {
  for (std::size_t i = 0; i < machines.size(); ++i)
    if (machines[i].id == id) return static_cast<int>(i);
  return -1;
}

int Model::conn_index(int m1, int m2) const {
  int a = std::min(m1, m2), b = std::max(m1, m2);
  for (std::size_t i = 0; i < conns.size(); ++i)
    if (conns[i].a == a && conns[i].b == b) return static_cast<int>(i);
  return -1;
}

std::vector<int> Model::by_iota() const {
  std::vector<int> order(machines.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return iota[static_cast<std::size_t>(x)] < iota[static_cast<std::size_t>(y)]; });
  return order;
}

void sense(const MachineDef& def, const std::vector<Value>& state, std::vector<Value>& store) {
  for (const auto& [key, loc] : def.sense) store[static_cast<std::size_t>(loc)] = state[static_cast<std::size_t>(key)];
}

void actuate(const MachineDef& def, const std::vector<Value>& store, std::vector<Value>& state) {
  for (const auto& [loc, key] : def.actuate) state[static_cast<std::size_t>(key)] = store[static_cast<std::size_t>(loc)];
}

std::vector<Value> eval_flow(const MachineDef& def, const std::vector<Value>& start, const Poly& elapsed) {
  std::vector<Value> out = start;
  if (def.flow.per_key.empty()) return out;
  std::map<sym::VarId, Poly> sub;
  for (std::size_t i = 0; i < start.size(); ++i)
    if (auto* p = std::get_if<Poly>(&start[i])) sub[static_cast<sym::VarId>(i)] = *p;
  sub[static_cast<sym::VarId>(start.size())] = elapsed;
  for (const auto& [key, poly] : def.flow.per_key) {
    std::set<sym::VarId> used;
    poly.collect_vars(used);
    for (auto v : used)
      if (!sub.count(v))
        throw std::runtime_error("flow of " + def.state_keys[static_cast<std::size_t>(key)] + " reads the non-numeric key " +
                                 def.state_keys[v]);
    out[static_cast<std::size_t>(key)] = poly.substitute(sub);
  }
  return out;
}

void begin_cycle(const MachineDef& def, Machine& mc, const std::vector<Value>& choice) {
  std::vector<Value> old_state = mc.state;
  actuate(def, mc.proc.store, mc.state);
  sense(def, old_state, mc.proc.store);
  std::size_t free_i = 0;
  for (const auto& in : def.inputs) {
    Value v;
    if (in.free) {
      v = choice.at(free_i++);
    } else {
      v = in.values[std::min(mc.cycle, in.values.size() - 1)];
    }
    for (int loc : in.locs) mc.proc.store[static_cast<std::size_t>(loc)] = v;
  }
  mc.timer = Poly(def.cycle_time);
  mc.env_timer = def.cycle_time;
  mc.env_elapsed = Poly();
  mc.cycle_state = mc.state;
  mc.proc = exec::load_programs(mc.proc);
  ++mc.cycle;
}

SystemState initial_state(const Model& m) {
  SystemState s;
  for (const auto& def : m.machines) {
    Machine mc;
    mc.proc = def.idle;
    mc.timer = Poly(def.init_timer);
    mc.env_timer = def.init_timer;
    mc.state = def.init_state;
    mc.cycle_state = def.init_state;
    if (def.preloaded) {
      std::vector<Value> choice;
      for (const auto& in : def.inputs)
        if (in.free) choice.push_back(in.values.front());
      begin_cycle(def, mc, choice);
    }
    s.machines.push_back(std::move(mc));
  }
  for (const auto& c : m.conns) {
    Conn cn;
    cn.valid = c.validity;
    cn.dmin = c.dmin;
    cn.dmax = c.dmax;
    s.conns.push_back(std::move(cn));
  }
  return s;
}

namespace {

using NameFn = std::function<std::string(sym::VarId)>;

std::string text(const Value& v, const NameFn& name) {
  if (auto* p = std::get_if<Poly>(&v)) return p->str(name);
  if (auto* f = std::get_if<Formula>(&v)) return "{" + f->str(name) + "}";
  return exec::value_str(v);
}

void transform(SystemState& s, const std::function<Value(const Value&)>& fv) {
  auto fp = [&](Poly& p) { p = std::get<Poly>(fv(Value(p))); };
  for (auto& mc : s.machines) {
    for (auto& v : mc.proc.store) v = fv(v);
    if (mc.proc.pending) mc.proc.pending = fv(*mc.proc.pending);
    fp(mc.timer);
    fp(mc.clock);
    fp(mc.env_elapsed);
    for (auto& v : mc.state) v = fv(v);
    for (auto& v : mc.cycle_state) v = fv(v);
  }
  for (auto& c : s.conns)
    for (auto& msg : c.buffer) {
      msg.data = fv(msg.data);
      fp(msg.min_timer);
      fp(msg.max_timer);
    }
}

void collect(const Value& v, std::vector<sym::VarId>& order, std::set<sym::VarId>& seen) {
  std::set<sym::VarId> vs;
  exec::collect_vars(v, vs);
  for (auto x : vs)
    if (seen.insert(x).second) order.push_back(x);
}

void term_order(const SystemState& s, std::vector<sym::VarId>& order, std::set<sym::VarId>& seen) {
  for (const auto& mc : s.machines) {
    for (const auto& v : mc.proc.store) collect(v, order, seen);
    if (mc.proc.pending) collect(*mc.proc.pending, order, seen);
    collect(mc.timer, order, seen);
    collect(mc.clock, order, seen);
    collect(mc.env_elapsed, order, seen);
    for (const auto& v : mc.state) collect(v, order, seen);
    for (const auto& v : mc.cycle_state) collect(v, order, seen);
  }
  for (const auto& c : s.conns)
    for (const auto& msg : c.buffer) {
      collect(msg.data, order, seen);
      collect(msg.min_timer, order, seen);
      collect(msg.max_timer, order, seen);
    }
}

std::string masked_msg_key(const Msg& m) {
  NameFn mask = [](sym::VarId) { return std::string("?"); };
  std::ostringstream o;
  o << m.sender << '|' << m.receiver << '|' << m.send_fb << '|' << m.recv_fb << '|' << text(m.data, mask) << '|'
    << m.min_timer.str(mask) << '|' << m.max_timer.str(mask);
  return o.str();
}

// Substitutes top-level linear equalities, eliminating variables that do not
// occur in the state term first.
void substitute_equalities(SystemState& s) {
  for (;;) {
    std::set<sym::VarId> alive = term_vars(s);
    std::optional<std::pair<sym::VarId, Poly>> pick;
    for (const auto& c : s.constraint.conjuncts()) {
      if (c.kind() != Formula::Kind::Atom) continue;
      const sym::Atom& a = c.as_atom();
      if (a.rel != sym::Rel::Eq || !a.p.is_linear()) continue;
      std::set<sym::VarId> vs;
      a.p.collect_vars(vs);
      std::optional<sym::VarId> x;
      for (auto v : vs)
        if (!alive.count(v)) x = v;
      if (!x) x = *vs.rbegin();
      Rational k = a.p.coeff(*x);
      Poly rest = a.p - Poly::var(*x).scaled(k);
      pick = std::make_pair(*x, rest.scaled(Rational(-1 / k)));
      break;
    }
    if (!pick) return;
    std::map<sym::VarId, Poly> sub{{pick->first, pick->second}};
    transform(s, [&](const Value& v) { return exec::substitute(v, sub); });
    s.constraint = s.constraint.substitute(sub);
  }
}

void project_dead(SystemState& s) {
  std::set<sym::VarId> alive = term_vars(s);
  std::vector<sym::Atom> simple;
  std::vector<Formula> complex;
  std::set<sym::VarId> in_complex;
  for (const auto& c : s.constraint.conjuncts()) {
    if (c.kind() == Formula::Kind::Atom && c.as_atom().rel != sym::Rel::Ne && c.as_atom().p.is_linear()) {
      simple.push_back(c.as_atom());
    } else {
      complex.push_back(c);
      c.collect_vars(in_complex);
    }
  }
  std::set<sym::VarId> dead;
  for (const auto& a : simple) {
    std::set<sym::VarId> vs;
    a.p.collect_vars(vs);
    for (auto v : vs)
      if (!alive.count(v) && !in_complex.count(v)) dead.insert(v);
  }
  if (dead.empty() && simple.empty()) return;
  auto projected = sym::project_linear(simple, dead);
  if (!projected) {
    s.constraint = Formula::bottom();
    return;
  }
  std::vector<Formula> parts = std::move(complex);
  for (const auto& a : *projected) parts.push_back(Formula::atom(a.p, a.rel));
  s.constraint = Formula::conj(std::move(parts));
}

}  // namespace

std::set<sym::VarId> term_vars(const SystemState& s) {
  std::vector<sym::VarId> order;
  std::set<sym::VarId> seen;
  term_order(s, order, seen);
  return seen;
}

std::string msg_str(const Model& m, const Msg& msg, const NameFn& name) {
  std::ostringstream o;
  o << "m(" << m.machines[static_cast<std::size_t>(msg.sender)].id << ", " << m.machines[static_cast<std::size_t>(msg.receiver)].id
    << ", \"" << msg.send_fb << "\", \"" << msg.recv_fb << "\", " << text(msg.data, name) << ", " << msg.min_timer.str(name)
    << ", " << msg.max_timer.str(name) << ")";
  return o.str();
}

CanonicalState canonicalize(const Model& m, const SystemState& in) {
  CanonicalState out;
  if (in.bound_reached) {
    out.state.bound_reached = true;
    out.key = "boundReached";
    out.hash = std::hash<std::string>{}(out.key);
    return out;
  }
  SystemState s = in;
  if (!s.constraint.is_true()) {
    substitute_equalities(s);
    project_dead(s);
  }
  // alpha-normalize
  std::vector<sym::VarId> order;
  std::set<sym::VarId> seen;
  for (auto& c : s.conns)
    std::stable_sort(c.buffer.begin(), c.buffer.end(),
                     [](const Msg& a, const Msg& b) { return masked_msg_key(a) < masked_msg_key(b); });
  term_order(s, order, seen);
  std::set<sym::VarId> cvars;
  s.constraint.collect_vars(cvars);
  for (auto v : cvars)
    if (seen.insert(v).second) order.push_back(v);
  std::map<sym::VarId, sym::VarId> ren;
  for (std::size_t i = 0; i < order.size(); ++i) ren[order[i]] = static_cast<sym::VarId>(i);
  bool identity = std::all_of(ren.begin(), ren.end(), [](const auto& p) { return p.first == p.second; });
  if (!identity) {
    transform(s, [&](const Value& v) { return exec::rename(v, ren); });
    s.constraint = s.constraint.rename(ren);
  }
  s.next_var = static_cast<std::uint32_t>(order.size());

  std::ostringstream o;
  NameFn name = sym::default_var_name;
  for (std::size_t i = 0; i < s.machines.size(); ++i) {
    const Machine& mc = s.machines[i];
    const MachineDef& def = m.machines[i];
    std::size_t phase = 0;
    for (const auto& inp : def.inputs)
      if (!inp.free) phase = std::max(phase, std::min(mc.cycle, inp.values.size() - 1));
    o << def.id << "{" << mc.proc.control_key() << " st[";
    for (const auto& v : mc.proc.store) o << text(v, name) << ';';
    o << "] tm=" << mc.timer.str(name) << " et=" << to_string(mc.env_timer) << " ck=" << mc.clock.str(name)
      << " ee=" << mc.env_elapsed.str(name) << " s[";
    for (const auto& v : mc.state) o << text(v, name) << ';';
    o << "] cs[";
    for (const auto& v : mc.cycle_state) o << text(v, name) << ';';
    o << "] ph=" << phase << "}";
  }
  for (const auto& c : s.conns) {
    o << "C{" << c.valid << ' ' << to_string(c.dmin) << ',' << to_string(c.dmax) << " [";
    for (const auto& msg : c.buffer) o << msg_str(m, msg, name) << ';';
    o << "]}";
  }
  o << " lt=" << s.last_tick << " phi=" << s.constraint.str(name);
  out.key = o.str();
  out.hash = std::hash<std::string>{}(out.key);
  out.state = std::move(s);
  return out;
}

std::string describe(const Model& m, const SystemState& s) {
  if (s.bound_reached) return "boundReached\n";
  std::ostringstream o;
  NameFn name = sym::default_var_name;
  for (std::size_t i = 0; i < s.machines.size(); ++i) {
    const Machine& mc = s.machines[i];
    const MachineDef& def = m.machines[i];
    o << "< " << def.id << " : PLCMachine | timer : " << mc.timer.str(name) << ", envTimer : " << to_string(mc.env_timer)
      << ", clock : " << mc.clock.str(name) << ",\n    state : ";
    for (std::size_t k = 0; k < def.state_keys.size(); ++k) {
      if (k) o << ", ";
      o << def.state_keys[k] << " |-> " << text(mc.state[k], name);
    }
    o << ",\n    proc : " << (exec::is_cycle_complete(mc.proc) ? "idle" : "running") << " [";
    const auto& L = *mc.proc.layout;
    bool first = true;
    for (std::size_t l = 0; l < L.loc_names.size(); ++l) {
      if (L.loc_names[l].find('.') != L.loc_names[l].rfind('.')) continue;  // hide FB internals
      o << (first ? "" : ", ") << L.loc_names[l] << "=" << text(mc.proc.store[l], name);
      first = false;
    }
    o << "] >\n";
  }
  for (std::size_t i = 0; i < s.conns.size(); ++i) {
    const Conn& c = s.conns[i];
    const ConnDef& d = m.conns[i];
    o << "< conn(" << m.machines[static_cast<std::size_t>(d.a)].id << ", " << m.machines[static_cast<std::size_t>(d.b)].id
      << ") : Conn | validity : " << (c.valid ? "true" : "false") << ", buffer : ";
    if (c.buffer.empty()) o << "empty";
    for (std::size_t j = 0; j < c.buffer.size(); ++j) o << (j ? " " : "") << msg_str(m, c.buffer[j], name);
    o << ", delay : (" << to_string(c.dmin) << ", " << to_string(c.dmax) << ") >\n";
  }
  if (!s.constraint.is_true()) o << "constraint : " << s.constraint.str(name) << "\n";
  return o.str();
}

}  // namespace plcnet::model
