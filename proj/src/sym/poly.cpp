#include "sym/poly.hpp"

#include <stdexcept>

namespace plcnet::sym {

std::string default_var_name(VarId v) { return "x" + std::to_string(v); }

Poly::Poly(const Rational& c) {
  if (c != 0) terms_.emplace(Monomial{}, c);
}

Poly Poly::var(VarId v) {
  Poly p;
  p.terms_.emplace(Monomial{{v, 1}}, Rational(1));
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rational Poly::constant_value() const {
  if (!is_constant()) throw std::logic_error("constant_value on symbolic polynomial " + str());
  return constant_term();
}

Rational Poly::constant_term() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational Poly::coeff(VarId v) const {
  auto it = terms_.find(Monomial{{v, 1}});
  return it == terms_.end() ? Rational(0) : it->second;
}

unsigned Poly::degree() const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) {
    unsigned md = 0;
    for (const auto& [v, e] : m) md += e;
    d = std::max(d, md);
  }
  return d;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Poly Poly::operator-() const {
  Poly r;
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

static Monomial mul_monomial(const Monomial& a, const Monomial& b) {
  Monomial r;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      r.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      r.push_back(b[j++]);
    } else {
      r.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return r;
}

Poly& Poly::operator*=(const Poly& o) {
  Poly r;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) r.add_term(mul_monomial(ma, mb), ca * cb);
  *this = std::move(r);
  return *this;
}

Poly Poly::scaled(const Rational& k) const {
  if (k == 0) return Poly();
  Poly r;
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, c * k);
  return r;
}

void Poly::collect_vars(std::set<VarId>& out) const {
  for (const auto& [m, c] : terms_)
    for (const auto& [v, e] : m) out.insert(v);
}

bool Poly::mentions(VarId v) const {
  for (const auto& [m, c] : terms_)
    for (const auto& [w, e] : m)
      if (w == v) return true;
  return false;
}

Poly Poly::substitute(const std::map<VarId, Poly>& sub) const {
  Poly r;
  for (const auto& [m, c] : terms_) {
    Poly term(c);
    Monomial rest;
    for (const auto& [v, e] : m) {
      auto it = sub.find(v);
      if (it == sub.end()) {
        rest.emplace_back(v, e);
      } else {
        for (unsigned k = 0; k < e; ++k) term *= it->second;
      }
    }
    if (!rest.empty()) {
      Poly mono;
      mono.terms_.emplace(rest, Rational(1));
      term *= mono;
    }
    r += term;
  }
  return r;
}

Poly Poly::rename(const std::map<VarId, VarId>& ren) const {
  std::map<VarId, Poly> sub;
  std::set<VarId> vars;
  collect_vars(vars);
  for (VarId v : vars) {
    auto it = ren.find(v);
    if (it != ren.end() && it->second != v) sub.emplace(v, Poly::var(it->second));
  }
  return sub.empty() ? *this : substitute(sub);
}

Rational Poly::evaluate(const std::map<VarId, Rational>& model) const {
  Rational total = 0;
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (const auto& [v, e] : m) {
      auto it = model.find(v);
      if (it == model.end()) throw std::out_of_range("unassigned variable " + default_var_name(v));
      for (unsigned k = 0; k < e; ++k) t *= it->second;
    }
    total += t;
  }
  return total;
}

std::string Poly::str(const std::function<std::string(VarId)>& name) const {
  if (terms_.empty()) return "0";
  auto nm = name ? name : default_var_name;
  std::string out;
  bool first = true;
  // Constant last reads better ("x0 - 10"); map order puts it first.
  auto emit = [&](const Monomial& m, const Rational& c) {
    Rational mag = abs(c);
    bool neg = c < 0;
    if (first) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    first = false;
    bool unit = mag == 1 && !m.empty();
    if (!unit) out += to_string(mag);
    bool star = !unit;
    for (const auto& [v, e] : m) {
      if (star) out += "*";
      out += nm(v);
      if (e > 1) out += "^" + std::to_string(e);
      star = true;
    }
  };
  for (const auto& [m, c] : terms_)
    if (!m.empty()) emit(m, c);
  auto it = terms_.find(Monomial{});
  if (it != terms_.end()) emit(it->first, it->second);
  return out;
}

}  // namespace plcnet::sym
