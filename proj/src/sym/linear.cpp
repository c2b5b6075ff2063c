#include "sym/linear.hpp"

#include <algorithm>
#include <stdexcept>

namespace plcnet::sym {

namespace {

// sum a[v]*v + c REL 0
struct LinCon {
  std::map<VarId, Rational> a;
  Rational c;
  Rel rel;
};

LinCon from_atom(const Atom& at) {
  if (!at.p.is_linear()) throw std::invalid_argument("nonlinear atom in linear solver: " + at.p.str());
  LinCon lc{{}, 0, at.rel};
  for (const auto& [m, c] : at.p.terms()) {
    if (m.empty()) {
      lc.c = c;
    } else {
      lc.a[m.front().first] = c;
    }
  }
  return lc;
}

Atom to_atom(const LinCon& lc) {
  Poly p(lc.c);
  for (const auto& [v, k] : lc.a) p += Poly::var(v).scaled(k);
  return normalize_atom(Atom{p, lc.rel});
}

// Substitutes v := e (e given as coefficients + constant).
void subst(LinCon& lc, VarId v, const std::map<VarId, Rational>& ea, const Rational& ec) {
  auto it = lc.a.find(v);
  if (it == lc.a.end()) return;
  Rational k = it->second;
  lc.a.erase(it);
  lc.c += k * ec;
  for (const auto& [w, x] : ea) {
    Rational& slot = lc.a[w];
    slot += k * x;
    if (slot == 0) lc.a.erase(w);
  }
}

bool constant_ok(const LinCon& lc) { return eval_rel(lc.c, lc.rel); }

// Keeps only the tightest of parallel inequalities and drops duplicates.
// Returns false if a constant constraint is violated.
bool tighten(std::vector<LinCon>& cons) {
  std::vector<LinCon> out;
  std::map<std::map<VarId, Rational>, std::size_t> ineq_slot;
  std::set<std::pair<std::map<VarId, Rational>, Rational>> eqs;
  for (auto& lc : cons) {
    if (lc.a.empty()) {
      if (!constant_ok(lc)) return false;
      continue;
    }
    // scale so the first coefficient has magnitude 1 (sign kept for inequalities)
    Rational lead = lc.a.begin()->second;
    Rational k = 1 / lead;
    if (lc.rel == Rel::Lt || lc.rel == Rel::Le) k = abs(k);
    for (auto& [v, x] : lc.a) x *= k;
    lc.c *= k;
    if (lc.rel == Rel::Lt || lc.rel == Rel::Le) {
      auto it = ineq_slot.find(lc.a);
      if (it == ineq_slot.end()) {
        ineq_slot.emplace(lc.a, out.size());
        out.push_back(std::move(lc));
      } else {
        LinCon& old = out[it->second];
        // a.x <= -c : larger c is tighter
        if (lc.c > old.c || (lc.c == old.c && lc.rel == Rel::Lt)) old = std::move(lc);
      }
    } else {
      if (lc.rel == Rel::Eq && !eqs.emplace(lc.a, lc.c).second) continue;
      out.push_back(std::move(lc));
    }
  }
  // parallel equalities with different constants
  for (const auto& lc : out) {
    if (lc.rel != Rel::Eq) continue;
    for (const auto& other : out) {
      if (other.rel == Rel::Eq && other.a == lc.a && other.c != lc.c) return false;
    }
  }
  cons = std::move(out);
  return true;
}

struct Elimination {
  VarId v;
  bool by_equality;
  std::map<VarId, Rational> ea;  // for equalities: v = ea.x + ec
  Rational ec;
  std::vector<LinCon> bounds;  // for FM: constraints mentioning v at elimination time
};

// Eliminates variables from `cons` (those in `which`, or all when null).
// Returns false on contradiction.
bool eliminate(std::vector<LinCon>& cons, const std::set<VarId>* which, std::vector<Elimination>* log) {
  auto wanted = [&](VarId v) { return which == nullptr || which->count(v) > 0; };
  if (!tighten(cons)) return false;
  // equalities first
  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t i = 0; i < cons.size(); ++i) {
      if (cons[i].rel != Rel::Eq) continue;
      auto pick = std::find_if(cons[i].a.begin(), cons[i].a.end(), [&](const auto& kv) { return wanted(kv.first); });
      if (pick == cons[i].a.end()) continue;
      VarId v = pick->first;
      Rational k = pick->second;
      std::map<VarId, Rational> ea;
      for (const auto& [w, x] : cons[i].a)
        if (w != v) ea[w] = -x / k;
      Rational ec = -cons[i].c / k;
      cons.erase(cons.begin() + static_cast<std::ptrdiff_t>(i));
      for (auto& lc : cons) subst(lc, v, ea, ec);
      if (log) log->push_back(Elimination{v, true, std::move(ea), ec, {}});
      if (!tighten(cons)) return false;
      progress = true;
      break;
    }
  }
  // Fourier-Motzkin on the rest
  for (;;) {
    std::set<VarId> present;
    for (const auto& lc : cons)
      for (const auto& [v, x] : lc.a)
        if (wanted(v)) present.insert(v);
    if (present.empty()) break;
    // cheapest variable first: fewest lower*upper products
    VarId best = *present.begin();
    std::size_t best_cost = SIZE_MAX;
    for (VarId v : present) {
      std::size_t lo = 0, hi = 0;
      for (const auto& lc : cons) {
        auto it = lc.a.find(v);
        if (it == lc.a.end()) continue;
        if (lc.rel == Rel::Ne) throw std::invalid_argument("cannot eliminate a variable under a disequality");
        (it->second > 0 ? hi : lo)++;
      }
      std::size_t cost = lo * hi;
      if (cost < best_cost) {
        best_cost = cost;
        best = v;
      }
    }
    std::vector<LinCon> lower, upper, rest;
    for (auto& lc : cons) {
      auto it = lc.a.find(best);
      if (it == lc.a.end()) {
        rest.push_back(std::move(lc));
      } else if (it->second > 0) {
        upper.push_back(std::move(lc));
      } else {
        lower.push_back(std::move(lc));
      }
    }
    for (const auto& lo : lower) {
      for (const auto& up : upper) {
        // scale each so the coefficient of best is -1 / +1, then add
        Rational kl = 1 / abs(lo.a.at(best));
        Rational ku = 1 / up.a.at(best);
        LinCon comb{{}, lo.c * kl + up.c * ku, (lo.rel == Rel::Lt || up.rel == Rel::Lt) ? Rel::Lt : Rel::Le};
        for (const auto& [w, x] : lo.a)
          if (w != best) comb.a[w] += x * kl;
        for (const auto& [w, x] : up.a)
          if (w != best) comb.a[w] += x * ku;
        for (auto it = comb.a.begin(); it != comb.a.end();) it = it->second == 0 ? comb.a.erase(it) : std::next(it);
        rest.push_back(std::move(comb));
      }
    }
    if (log) {
      Elimination e{best, false, {}, 0, {}};
      e.bounds = lower;
      e.bounds.insert(e.bounds.end(), upper.begin(), upper.end());
      log->push_back(std::move(e));
    }
    cons = std::move(rest);
    if (!tighten(cons)) return false;
  }
  return true;
}

Rational eval_lin(const std::map<VarId, Rational>& a, const Rational& c, const Model& m) {
  Rational s = c;
  for (const auto& [v, x] : a) {
    auto it = m.find(v);
    if (it != m.end()) s += x * it->second;
  }
  return s;
}

Rational floor_q(const Rational& q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rational(f);
}

Rational ceil_q(const Rational& q) {
  mpz_class f;
  mpz_cdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rational(f);
}

// Picks a value inside the bounds, preferring integers.
Rational choose(const std::optional<Rational>& lo, bool lo_strict, const std::optional<Rational>& hi, bool hi_strict) {
  if (!lo && !hi) return 0;
  if (lo && !hi) {
    if (!lo_strict) return *lo;
    return floor_q(*lo) + 1;
  }
  if (!lo && hi) {
    if (!hi_strict) return *hi;
    return ceil_q(*hi) - 1;
  }
  if (*lo == *hi) return *lo;
  Rational cand = lo_strict ? Rational(floor_q(*lo) + 1) : ceil_q(*lo);
  if (cand < *hi || (cand == *hi && !hi_strict)) return cand;
  return (*lo + *hi) / 2;
}

}  // namespace

LinearResult check_linear(const std::vector<Atom>& atoms, const std::set<VarId>& extra) {
  std::vector<LinCon> cons;
  std::set<VarId> all = extra;
  for (const auto& at : atoms) {
    if (at.rel == Rel::Ne) throw std::invalid_argument("check_linear: disequalities must be split first");
    at.p.collect_vars(all);
    cons.push_back(from_atom(at));
  }
  std::vector<Elimination> log;
  LinearResult res;
  if (!eliminate(cons, nullptr, &log)) return res;
  res.sat = true;
  for (VarId v : all) res.model[v] = 0;
  for (auto it = log.rbegin(); it != log.rend(); ++it) {
    if (it->by_equality) {
      res.model[it->v] = eval_lin(it->ea, it->ec, res.model);
      continue;
    }
    std::optional<Rational> lo, hi;
    bool lo_strict = false, hi_strict = false;
    for (const auto& b : it->bounds) {
      Rational k = b.a.at(it->v);
      std::map<VarId, Rational> others = b.a;
      others.erase(it->v);
      // k*v + r REL 0
      Rational r = eval_lin(others, b.c, res.model);
      Rational bound = -r / k;
      bool strict = b.rel == Rel::Lt;
      if (k > 0) {
        if (!hi || bound < *hi || (bound == *hi && strict)) {
          hi = bound;
          hi_strict = strict;
        }
      } else {
        if (!lo || bound > *lo || (bound == *lo && strict)) {
          lo = bound;
          lo_strict = strict;
        }
      }
    }
    res.model[it->v] = choose(lo, lo_strict, hi, hi_strict);
  }
  return res;
}

std::optional<std::vector<Atom>> project_linear(const std::vector<Atom>& atoms, const std::set<VarId>& elim) {
  std::vector<LinCon> cons;
  for (const auto& at : atoms) cons.push_back(from_atom(at));
  if (!eliminate(cons, &elim, nullptr)) return std::nullopt;
  std::vector<Atom> out;
  for (const auto& lc : cons) out.push_back(to_atom(lc));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace plcnet::sym
