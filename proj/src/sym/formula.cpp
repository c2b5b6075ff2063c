#include "sym/formula.hpp"

#include <algorithm>
#include <stdexcept>

namespace plcnet::sym {

struct Formula::Node {
  Kind kind;
  Atom atom;
  std::vector<Formula> kids;
};

namespace {

Rational leading_coeff(const Poly& p) {
  for (const auto& [m, c] : p.terms())
    if (!m.empty()) return c;
  return p.constant_term();
}

}  // namespace

bool eval_rel(const Rational& v, Rel rel) {
  switch (rel) {
    case Rel::Lt: return v < 0;
    case Rel::Le: return v <= 0;
    case Rel::Eq: return v == 0;
    case Rel::Ne: return v != 0;
  }
  return false;
}

std::string rel_str(Rel r) {
  switch (r) {
    case Rel::Lt: return "<";
    case Rel::Le: return "<=";
    case Rel::Eq: return "=";
    case Rel::Ne: return "!=";
  }
  return "?";
}

Atom normalize_atom(const Atom& a) {
  if (a.p.is_constant()) return a;
  Rational lc = leading_coeff(a.p);
  Rational k = 1 / lc;
  if (a.rel == Rel::Lt || a.rel == Rel::Le) k = abs(k);
  return Atom{a.p.scaled(k), a.rel};
}

Formula::Formula() : n_(nullptr) {}

Formula Formula::top() { return Formula(); }

Formula Formula::bottom() {
  static const auto n = std::make_shared<const Node>(Node{Kind::False, {}, {}});
  return Formula(n);
}

Formula Formula::atom(const Poly& p, Rel rel) {
  if (p.is_constant()) return boolean(eval_rel(p.constant_value(), rel));
  Atom a = normalize_atom(Atom{p, rel});
  return Formula(std::make_shared<const Node>(Node{Kind::Atom, std::move(a), {}}));
}

Formula Formula::conj(std::vector<Formula> parts) {
  std::vector<Formula> flat;
  for (auto& f : parts) {
    switch (f.kind()) {
      case Kind::True: break;
      case Kind::False: return bottom();
      case Kind::And:
        for (const auto& k : f.children()) flat.push_back(k);
        break;
      default: flat.push_back(std::move(f));
    }
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.empty()) return top();
  if (flat.size() == 1) return flat.front();
  return Formula(std::make_shared<const Node>(Node{Kind::And, {}, std::move(flat)}));
}

Formula Formula::disj(std::vector<Formula> parts) {
  std::vector<Formula> flat;
  for (auto& f : parts) {
    switch (f.kind()) {
      case Kind::False: break;
      case Kind::True: return top();
      case Kind::Or:
        for (const auto& k : f.children()) flat.push_back(k);
        break;
      default: flat.push_back(std::move(f));
    }
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.empty()) return bottom();
  if (flat.size() == 1) return flat.front();
  return Formula(std::make_shared<const Node>(Node{Kind::Or, {}, std::move(flat)}));
}

Formula::Kind Formula::kind() const { return n_ ? n_->kind : Kind::True; }

const Atom& Formula::as_atom() const {
  if (kind() != Kind::Atom) throw std::logic_error("formula is not an atom");
  return n_->atom;
}

const std::vector<Formula>& Formula::children() const {
  static const std::vector<Formula> none;
  return n_ ? n_->kids : none;
}

Formula Formula::negate() const {
  switch (kind()) {
    case Kind::True: return bottom();
    case Kind::False: return top();
    case Kind::Atom: {
      const Atom& a = n_->atom;
      switch (a.rel) {
        case Rel::Lt: return atom(-a.p, Rel::Le);
        case Rel::Le: return atom(-a.p, Rel::Lt);
        case Rel::Eq: return atom(a.p, Rel::Ne);
        case Rel::Ne: return atom(a.p, Rel::Eq);
      }
      break;
    }
    case Kind::And: {
      std::vector<Formula> v;
      for (const auto& k : n_->kids) v.push_back(k.negate());
      return disj(std::move(v));
    }
    case Kind::Or: {
      std::vector<Formula> v;
      for (const auto& k : n_->kids) v.push_back(k.negate());
      return conj(std::move(v));
    }
  }
  return top();
}

void Formula::collect_vars(std::set<VarId>& out) const {
  switch (kind()) {
    case Kind::Atom: n_->atom.p.collect_vars(out); break;
    case Kind::And:
    case Kind::Or:
      for (const auto& k : n_->kids) k.collect_vars(out);
      break;
    default: break;
  }
}

bool Formula::is_linear() const {
  switch (kind()) {
    case Kind::Atom: return n_->atom.p.is_linear();
    case Kind::And:
    case Kind::Or:
      return std::all_of(n_->kids.begin(), n_->kids.end(), [](const Formula& k) { return k.is_linear(); });
    default: return true;
  }
}

Formula Formula::substitute(const std::map<VarId, Poly>& sub) const {
  switch (kind()) {
    case Kind::Atom: return atom(n_->atom.p.substitute(sub), n_->atom.rel);
    case Kind::And:
    case Kind::Or: {
      std::vector<Formula> v;
      for (const auto& k : n_->kids) v.push_back(k.substitute(sub));
      return kind() == Kind::And ? conj(std::move(v)) : disj(std::move(v));
    }
    default: return *this;
  }
}

Formula Formula::rename(const std::map<VarId, VarId>& ren) const {
  switch (kind()) {
    case Kind::Atom: return atom(n_->atom.p.rename(ren), n_->atom.rel);
    case Kind::And:
    case Kind::Or: {
      std::vector<Formula> v;
      for (const auto& k : n_->kids) v.push_back(k.rename(ren));
      return kind() == Kind::And ? conj(std::move(v)) : disj(std::move(v));
    }
    default: return *this;
  }
}

bool Formula::evaluate(const Model& m) const {
  switch (kind()) {
    case Kind::True: return true;
    case Kind::False: return false;
    case Kind::Atom: return eval_rel(n_->atom.p.evaluate(m), n_->atom.rel);
    case Kind::And:
      return std::all_of(n_->kids.begin(), n_->kids.end(), [&](const Formula& k) { return k.evaluate(m); });
    case Kind::Or:
      return std::any_of(n_->kids.begin(), n_->kids.end(), [&](const Formula& k) { return k.evaluate(m); });
  }
  return false;
}

std::vector<Formula> Formula::conjuncts() const {
  if (kind() == Kind::True) return {};
  if (kind() == Kind::And) return n_->kids;
  return {*this};
}

std::string Formula::str(const std::function<std::string(VarId)>& name) const {
  switch (kind()) {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::Atom: return n_->atom.p.str(name) + " " + rel_str(n_->atom.rel) + " 0";
    case Kind::And:
    case Kind::Or: {
      std::string sep = kind() == Kind::And ? " && " : " || ";
      std::string out = "(";
      for (std::size_t i = 0; i < n_->kids.size(); ++i) {
        if (i) out += sep;
        out += n_->kids[i].str(name);
      }
      return out + ")";
    }
  }
  return "?";
}

namespace {

std::string smt_rational(const Rational& q) {
  std::string num = mpz_class(abs(q.get_num())).get_str();
  std::string body = q.get_den() == 1 ? num + ".0" : "(/ " + num + ".0 " + q.get_den().get_str() + ".0)";
  return q < 0 ? "(- " + body + ")" : body;
}

}  // namespace

std::string smtlib_poly(const Poly& p) {
  if (p.is_zero()) return "0.0";
  std::vector<std::string> terms;
  for (const auto& [m, c] : p.terms()) {
    std::vector<std::string> factors;
    if (m.empty() || c != 1) factors.push_back(smt_rational(c));
    for (const auto& [v, e] : m)
      for (unsigned k = 0; k < e; ++k) factors.push_back(default_var_name(v));
    if (factors.size() == 1) {
      terms.push_back(factors.front());
    } else {
      std::string t = "(*";
      for (const auto& f : factors) t += " " + f;
      terms.push_back(t + ")");
    }
  }
  if (terms.size() == 1) return terms.front();
  std::string out = "(+";
  for (const auto& t : terms) out += " " + t;
  return out + ")";
}

std::string Formula::smtlib() const {
  switch (kind()) {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::Atom: {
      std::string p = smtlib_poly(n_->atom.p);
      switch (n_->atom.rel) {
        case Rel::Lt: return "(< " + p + " 0.0)";
        case Rel::Le: return "(<= " + p + " 0.0)";
        case Rel::Eq: return "(= " + p + " 0.0)";
        case Rel::Ne: return "(not (= " + p + " 0.0))";
      }
      break;
    }
    case Kind::And:
    case Kind::Or: {
      std::string out = kind() == Kind::And ? "(and" : "(or";
      for (const auto& k : n_->kids) out += " " + k.smtlib();
      return out + ")";
    }
  }
  return "true";
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.n_ == b.n_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False: return true;
    case Formula::Kind::Atom: return a.n_->atom == b.n_->atom;
    default: return a.n_->kids == b.n_->kids;
  }
}

bool operator<(const Formula& a, const Formula& b) {
  if (a.n_ == b.n_) return false;
  if (a.kind() != b.kind()) return a.kind() < b.kind();
  switch (a.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False: return false;
    case Formula::Kind::Atom: return a.n_->atom < b.n_->atom;
    default: return a.n_->kids < b.n_->kids;
  }
}

}  // namespace plcnet::sym
