#include "por/por.hpp"

#include <algorithm>
#include <climits>

namespace plcnet::por {

std::vector<std::size_t> ample(const model::Model& m, const Expansion& x) {
  std::vector<std::size_t> out;
  const auto& ts = x.transitions;
  auto least = [&](TransitionClass c) {
    int best = -1, best_iota = INT_MAX;
    for (const auto& t : ts)
      if (t.cls == c && m.iota[static_cast<std::size_t>(t.id.machine)] < best_iota) {
        best = t.id.machine;
        best_iota = m.iota[static_cast<std::size_t>(t.id.machine)];
      }
    for (std::size_t k = 0; k < ts.size(); ++k)
      if (ts[k].cls == c && ts[k].id.machine == best) out.push_back(k);
    return !out.empty();
  };
  if (least(TransitionClass::Start) || least(TransitionClass::Internal)) return out;

  for (std::size_t k = 0; k < ts.size(); ++k)
    if (ts[k].cls == TransitionClass::Comm) out.push_back(k);
  if (!out.empty()) return out;

  for (std::size_t k = 0; k < ts.size(); ++k) out.push_back(k);
  return out;
}

bool needs_full_expansion(const Expansion& x, const std::vector<std::size_t>& amp,
                          const std::vector<bool>& successor_on_path) {
  if (amp.size() == x.transitions.size()) return false;
  for (std::size_t k : amp)
    if (successor_on_path[k] || x.transitions[k].back_edge) return true;
  return false;
}

namespace {

const Transition* find(const Expansion& x, const sem::TransitionId& id) {
  for (const auto& t : x.transitions)
    if (t.id == id) return &t;
  return nullptr;
}

}  // namespace

IndependenceReport check_independence(sem::Engine& e, const model::SystemState& s, const sem::TransitionId& a,
                                      const sem::TransitionId& b) {
  const model::Model& m = e.model();
  IndependenceReport r;
  Expansion x = e.expand(s);
  const Transition* ta = find(x, a);
  const Transition* tb = find(x, b);
  if (!ta || !tb) return r;
  // symbolic guards may each be satisfiable but exclude each other
  if (e.options().mode == model::Mode::Symbolic && !(ta->added.is_true() && tb->added.is_true())) {
    sym::Formula both = s.constraint && ta->added && tb->added;
    if (both.is_false() || (!both.is_true() && e.solver().check(both, sym::QueryClass::Path) == sym::SatResult::Unsat))
      return r;
  }

  Expansion xa = e.expand(ta->next);
  Expansion xb = e.expand(tb->next);
  const Transition* tab = find(xa, b);
  const Transition* tba = find(xb, a);
  r.verdict = Independence::Dependent;
  if (!tab) {
    r.reason = a.str(m) + " disables " + b.str(m);
    return r;
  }
  if (!tba) {
    r.reason = b.str(m) + " disables " + a.str(m);
    return r;
  }
  // the tick-suppression flag records the last step taken, not the state
  model::SystemState sa = tab->next, sb = tba->next;
  sa.last_tick = sb.last_tick = false;
  auto ka = model::canonicalize(m, sa).key;
  auto kb = model::canonicalize(m, sb).key;
  if (ka != kb) {
    r.reason = a.str(m) + " and " + b.str(m) + " reach different states in the two orders";
    return r;
  }
  r.verdict = Independence::Independent;
  return r;
}

bool claimed_independent(const Transition& a, const Transition& b) {
  auto is = [&](TransitionClass c) { return a.cls == c || b.cls == c; };
  if (a.cls == TransitionClass::Start && b.cls == TransitionClass::Start) return false;
  if (is(TransitionClass::Tick)) return !(a.cls == TransitionClass::Tick && b.cls == TransitionClass::Tick);
  if (is(TransitionClass::Start)) return true;
  if (a.cls == TransitionClass::Internal && b.cls == TransitionClass::Internal) return a.id.machine != b.id.machine;
  return false;
}

}  // namespace plcnet::por
