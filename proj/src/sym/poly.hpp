#pragma once

#include "core/rational.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace plcnet::sym {

using VarId = std::uint32_t;

/// Product of variables with positive exponents, sorted by variable id.
using Monomial = std::vector<std::pair<VarId, unsigned>>;

/// Polynomial with exact rational coefficients over real-valued variables.
/// Concrete numbers are constant polynomials.
class Poly {
 public:
  Poly() = default;
  Poly(const Rational& c);  // NOLINT(google-explicit-constructor): numbers lift implicitly
  Poly(long c) : Poly(Rational(c)) {}  // NOLINT
  Poly(int c) : Poly(Rational(c)) {}   // NOLINT

  static Poly var(VarId v);

  bool is_constant() const;
  bool is_zero() const { return terms_.empty(); }
  /// Only valid when is_constant().
  Rational constant_value() const;
  /// Coefficient of the empty monomial.
  Rational constant_term() const;
  Rational coeff(VarId v) const;  // coefficient of the degree-1 monomial v
  unsigned degree() const;
  bool is_linear() const { return degree() <= 1; }

  const std::map<Monomial, Rational>& terms() const { return terms_; }

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, const Poly& b) { return a *= b; }
  Poly scaled(const Rational& k) const;

  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
  friend bool operator<(const Poly& a, const Poly& b) { return a.terms_ < b.terms_; }

  void collect_vars(std::set<VarId>& out) const;
  bool mentions(VarId v) const;
  Poly substitute(const std::map<VarId, Poly>& sub) const;
  Poly rename(const std::map<VarId, VarId>& ren) const;
  /// Missing variables are an error (std::out_of_range).
  Rational evaluate(const std::map<VarId, Rational>& model) const;

  /// Deterministic text; variables printed via `name` (default "x<id>").
  std::string str(const std::function<std::string(VarId)>& name = {}) const;

 private:
  void add_term(const Monomial& m, const Rational& c);
  std::map<Monomial, Rational> terms_;
};

std::string default_var_name(VarId v);

}  // namespace plcnet::sym
