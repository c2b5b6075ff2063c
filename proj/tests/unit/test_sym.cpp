#include "doctest.h"

#include "sym/formula.hpp"
#include "sym/linear.hpp"
#include "sym/solver.hpp"

#include <random>

using namespace plcnet;
using namespace plcnet::sym;

namespace {

Poly X(VarId v) { return Poly::var(v); }

// Brute-force oracle: searches a grid of rationals with step 1/4 in [-8,8].
// Only used for formulas whose satisfiable regions (if any) contain a grid point.
bool grid_sat(const Formula& f, const std::vector<VarId>& vars) {
  std::vector<Rational> pts;
  for (int i = -32; i <= 32; ++i) pts.emplace_back(i, 4);
  for (auto& p : pts) p.canonicalize();
  Model m;
  std::function<bool(std::size_t)> rec = [&](std::size_t i) {
    if (i == vars.size()) return f.evaluate(m);
    for (const auto& p : pts) {
      m[vars[i]] = p;
      if (rec(i + 1)) return true;
    }
    return false;
  };
  return rec(0);
}

}  // namespace

TEST_CASE("rational parsing and printing") {
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-2/4") == Rational(-1, 2));
  CHECK(parse_rational("+7") == 7);
  Rational q(6, 4);
  q.canonicalize();
  CHECK(to_string(q) == "3/2");
  CHECK_THROWS(parse_rational("1.2.3"));
  CHECK_THROWS(parse_rational("abc"));
  CHECK(monus(3, 5) == 0);
  CHECK(monus(5, 3) == 2);
  CHECK(min(TimeBound::infinity(), TimeBound{Rational(3)}).value == Rational(3));
}

TEST_CASE("polynomial arithmetic") {
  Poly p = X(0) * 2 + 3;
  Poly q = X(0) - 1;
  Poly r = p * q;  // 2x^2 + x - 3
  CHECK(r.degree() == 2);
  CHECK(r.evaluate({{0, Rational(2)}}) == 7);
  CHECK((p - p).is_zero());
  CHECK(r.str() == "x0 + 2*x0^2 - 3");
  CHECK(r.substitute({{0, Poly(1)}}).constant_value() == 0);
  CHECK(X(3).rename({{3, 0}}) == X(0));
}

TEST_CASE("formula folding and negation") {
  CHECK(Formula::lt(Poly(1), Poly(2)).is_true());
  CHECK(Formula::eq(Poly(1), Poly(2)).is_false());
  Formula a = Formula::lt(X(0), Poly(5));
  Formula b = Formula::ge(X(1), Poly(0));
  CHECK((a && Formula::bottom()).is_false());
  CHECK((a || Formula::top()).is_true());
  CHECK((a && b) == (b && a));
  // normalization: 2x < 10 is the same atom as x < 5
  CHECK(Formula::lt(X(0) * 2, Poly(10)) == a);
  Model m{{0, Rational(5)}, {1, Rational(-1)}};
  CHECK((a && b).negate().evaluate(m) == !(a && b).evaluate(m));
}

TEST_CASE("linear solver small cases") {
  Solver s(SolverOptions{Backend::Internal, {}});
  Model m;
  // x > 0, x < 1 : sat with non-integer witness
  Formula f = Formula::gt(X(0), 0) && Formula::lt(X(0), 1);
  REQUIRE(s.check(f, QueryClass::Path, &m) == SatResult::Sat);
  CHECK(f.evaluate(m));
  // strict contradiction x < y, y < x
  CHECK(s.check(Formula::lt(X(0), X(1)) && Formula::lt(X(1), X(0)), QueryClass::Path) == SatResult::Unsat);
  // x <= y, y <= x, x != y
  CHECK(s.check(Formula::le(X(0), X(1)) && Formula::le(X(1), X(0)) && Formula::ne(X(0), X(1)), QueryClass::Path) ==
        SatResult::Unsat);
  // equalities chain: x = y + 1, y = 2z, z = 3 -> x = 7
  Formula g = Formula::eq(X(0), X(1) + 1) && Formula::eq(X(1), X(2) * 2) && Formula::eq(X(2), 3);
  REQUIRE(s.check(g, QueryClass::Path, &m) == SatResult::Sat);
  CHECK(m.at(0) == 7);
  // disjunction where only the second branch works
  Formula h = (Formula::lt(X(0), 0) || Formula::gt(X(0), 10)) && Formula::ge(X(0), 0);
  REQUIRE(s.check(h, QueryClass::Property, &m) == SatResult::Sat);
  CHECK(m.at(0) > 10);
  CHECK(s.stats().queries[static_cast<int>(QueryClass::Path)] == 4);
  CHECK(s.stats().queries[static_cast<int>(QueryClass::Property)] == 1);
}

TEST_CASE("projection keeps the shadow") {
  // 0 <= x <= 10, y = x + t, 0 < t <= 3  ->  exists x,t: 0 < y <= 13
  std::vector<Atom> atoms;
  for (auto f : {Formula::ge(X(0), 0), Formula::le(X(0), 10), Formula::eq(X(1), X(0) + X(2)), Formula::gt(X(2), 0),
                 Formula::le(X(2), 3)})
    atoms.push_back(f.as_atom());
  auto proj = project_linear(atoms, {0, 2});
  REQUIRE(proj.has_value());
  std::vector<Formula> parts;
  for (const auto& a : *proj) parts.push_back(Formula::atom(a.p, a.rel));
  Formula shadow = Formula::conj(parts);
  std::set<VarId> vs;
  shadow.collect_vars(vs);
  CHECK(vs == std::set<VarId>{1});
  CHECK(shadow == (Formula::gt(X(1), 0) && Formula::le(X(1), 13)));
}

TEST_CASE("property: internal solver agrees with grid oracle and models satisfy") {
  std::mt19937 rng(1234);
  std::uniform_int_distribution<int> coef(-3, 3), cst(-6, 6), rel(0, 3), nat(1, 4);
  Solver s(SolverOptions{Backend::Internal, {}});
  int sat_count = 0;
  for (int iter = 0; iter < 300; ++iter) {
    std::vector<Formula> conj;
    int natoms = nat(rng);
    for (int i = 0; i < natoms; ++i) {
      // integer coefficients in {-1,0,1} keep satisfiable regions grid-visible
      Poly p = X(0) * (coef(rng) % 2) + X(1) * (coef(rng) % 2) + Poly(cst(rng));
      Rel r = static_cast<Rel>(rel(rng));
      Formula a = Formula::atom(p, r);
      if (i % 2 == 1 && !conj.empty()) {
        conj.back() = conj.back() || a;
      } else {
        conj.push_back(a);
      }
    }
    Formula f = Formula::conj(conj);
    Model m;
    SatResult r = s.check(f, QueryClass::Path, &m, {0, 1});
    bool oracle = grid_sat(f, {0, 1});
    if (oracle) {
      CHECK(r == SatResult::Sat);
    }
    if (r == SatResult::Sat) {
      ++sat_count;
      CHECK(f.evaluate(m));
    }
  }
  CHECK(sat_count > 50);
}

TEST_CASE("external solver differential (skipped when no solver installed)") {
  std::string ext = Solver::locate_external("");
  if (ext.empty()) return;
  Solver in(SolverOptions{Backend::Internal, {}});
  Solver ex(SolverOptions{Backend::External, ext});
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> coef(-4, 4), rel(0, 3);
  for (int iter = 0; iter < 25; ++iter) {
    std::vector<Formula> parts;
    for (int i = 0; i < 3; ++i)
      parts.push_back(Formula::atom(X(0) * coef(rng) + X(1) * coef(rng) + X(2) * coef(rng) + Poly(coef(rng)),
                                    static_cast<Rel>(rel(rng))));
    Formula f = Formula::conj(parts) || Formula::lt(X(2), X(0) - 100);
    Model m;
    SatResult a = in.check(f, QueryClass::Path);
    SatResult b = ex.check(f, QueryClass::Path, &m);
    CHECK(a == b);
    if (b == SatResult::Sat) CHECK(f.evaluate(m));
  }
  // nonlinear goes external in Auto
  Solver au(SolverOptions{Backend::Auto, ext});
  Model m;
  CHECK(au.check(Formula::eq(X(0) * X(0), 4) && Formula::lt(X(0), 0), QueryClass::Path, &m) == SatResult::Sat);
  CHECK(m.at(0) == -2);
  CHECK(au.stats().external_calls == 1);
}
