#include "exec/value.hpp"

#include <stdexcept>

namespace plcnet::exec {

Value normalize(Value v) {
  if (auto* f = std::get_if<sym::Formula>(&v)) {
    if (f->is_true()) return true;
    if (f->is_false()) return false;
  }
  return v;
}

bool is_symbolic(const Value& v) {
  if (auto* p = std::get_if<sym::Poly>(&v)) return !p->is_constant();
  return std::holds_alternative<sym::Formula>(v);
}

void collect_vars(const Value& v, std::set<sym::VarId>& out) {
  if (auto* p = std::get_if<sym::Poly>(&v)) p->collect_vars(out);
  if (auto* f = std::get_if<sym::Formula>(&v)) f->collect_vars(out);
}

Value rename(const Value& v, const std::map<sym::VarId, sym::VarId>& ren) {
  if (auto* p = std::get_if<sym::Poly>(&v)) return p->rename(ren);
  if (auto* f = std::get_if<sym::Formula>(&v)) return normalize(f->rename(ren));
  return v;
}

Value substitute(const Value& v, const std::map<sym::VarId, sym::Poly>& sub) {
  if (auto* p = std::get_if<sym::Poly>(&v)) return p->substitute(sub);
  if (auto* f = std::get_if<sym::Formula>(&v)) return normalize(f->substitute(sub));
  return v;
}

std::string value_str(const Value& v) {
  struct V {
    std::string operator()(bool b) const { return b ? "TRUE" : "FALSE"; }
    std::string operator()(const sym::Poly& p) const { return p.str(); }
    std::string operator()(const std::string& s) const { return "\"" + s + "\""; }
    std::string operator()(const sym::Formula& f) const { return "{" + f.str() + "}"; }
    std::string operator()(RcvError) const { return "rcvError"; }
  };
  return std::visit(V{}, v);
}

bool value_equal(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  struct V {
    const Value& other;
    bool operator()(bool x) const { return x == std::get<bool>(other); }
    bool operator()(const sym::Poly& x) const { return x == std::get<sym::Poly>(other); }
    bool operator()(const std::string& x) const { return x == std::get<std::string>(other); }
    bool operator()(const sym::Formula& x) const { return x == std::get<sym::Formula>(other); }
    bool operator()(RcvError) const { return true; }
  };
  return std::visit(V{b}, a);
}

sym::Formula as_formula(const Value& v) {
  if (auto* b = std::get_if<bool>(&v)) return sym::Formula::boolean(*b);
  if (auto* f = std::get_if<sym::Formula>(&v)) return *f;
  throw std::runtime_error("expected a boolean, got " + value_str(v));
}

const sym::Poly& as_poly(const Value& v) {
  if (auto* p = std::get_if<sym::Poly>(&v)) return *p;
  throw std::runtime_error("expected a number, got " + value_str(v));
}

}  // namespace plcnet::exec
