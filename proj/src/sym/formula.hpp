#pragma once

#include "sym/poly.hpp"

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace plcnet::sym {

/// Atom relation against zero: p < 0, p <= 0, p = 0, p != 0.
enum class Rel { Lt, Le, Eq, Ne };

struct Atom {
  Poly p;
  Rel rel;
  friend bool operator==(const Atom& a, const Atom& b) { return a.rel == b.rel && a.p == b.p; }
  friend bool operator<(const Atom& a, const Atom& b) {
    if (a.rel != b.rel) return a.rel < b.rel;
    return a.p < b.p;
  }
};

using Model = std::map<VarId, Rational>;

/// Quantifier-free formula in negation normal form. Immutable and cheap to copy.
/// Constructors fold constants, so a formula without variables is always
/// literally true or false.
class Formula {
 public:
  enum class Kind { True, False, Atom, And, Or };

  Formula();  // true
  static Formula top();
  static Formula bottom();
  static Formula atom(const Poly& p, Rel rel);
  static Formula conj(std::vector<Formula> parts);
  static Formula disj(std::vector<Formula> parts);
  static Formula boolean(bool b) { return b ? top() : bottom(); }

  static Formula lt(const Poly& a, const Poly& b) { return atom(a - b, Rel::Lt); }
  static Formula le(const Poly& a, const Poly& b) { return atom(a - b, Rel::Le); }
  static Formula gt(const Poly& a, const Poly& b) { return atom(b - a, Rel::Lt); }
  static Formula ge(const Poly& a, const Poly& b) { return atom(b - a, Rel::Le); }
  static Formula eq(const Poly& a, const Poly& b) { return atom(a - b, Rel::Eq); }
  static Formula ne(const Poly& a, const Poly& b) { return atom(a - b, Rel::Ne); }

  Kind kind() const;
  bool is_true() const { return kind() == Kind::True; }
  bool is_false() const { return kind() == Kind::False; }
  const Atom& as_atom() const;
  const std::vector<Formula>& children() const;

  Formula negate() const;
  Formula operator&&(const Formula& o) const { return conj({*this, o}); }
  Formula operator||(const Formula& o) const { return disj({*this, o}); }
  Formula operator!() const { return negate(); }

  void collect_vars(std::set<VarId>& out) const;
  bool is_linear() const;
  Formula substitute(const std::map<VarId, Poly>& sub) const;
  Formula rename(const std::map<VarId, VarId>& ren) const;
  /// Evaluates under a total model. Throws std::out_of_range on missing variables.
  bool evaluate(const Model& m) const;

  /// Flattens a top-level conjunction into its conjuncts (true gives none).
  std::vector<Formula> conjuncts() const;

  std::string str(const std::function<std::string(VarId)>& name = {}) const;
  /// SMT-LIB v2 term.
  std::string smtlib() const;

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator<(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

/// Scales an atom to a canonical representative: leading coefficient +-1 for
/// inequalities (positive scaling only), exactly 1 for (dis)equalities.
Atom normalize_atom(const Atom& a);
bool eval_rel(const Rational& v, Rel rel);
std::string rel_str(Rel r);
std::string smtlib_poly(const Poly& p);

}  // namespace plcnet::sym
