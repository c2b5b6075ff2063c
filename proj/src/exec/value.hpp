#pragma once

#include "sym/formula.hpp"

#include <set>
#include <string>
#include <variant>

namespace plcnet::exec {

/// Result of a failed receive (`rcvError`); distinct from every data value.
struct RcvError {
  friend bool operator==(RcvError, RcvError) { return true; }
};

/// A store value: concrete or symbolic number (Poly), boolean (bool when
/// decided, Formula otherwise), string, or the receive-error marker.
using Value = std::variant<bool, sym::Poly, std::string, sym::Formula, RcvError>;

/// Collapses constant formulas to bool.
Value normalize(Value v);
bool is_symbolic(const Value& v);
void collect_vars(const Value& v, std::set<sym::VarId>& out);
Value rename(const Value& v, const std::map<sym::VarId, sym::VarId>& ren);
Value substitute(const Value& v, const std::map<sym::VarId, sym::Poly>& sub);
/// Deterministic text used for printing and canonical hashing.
std::string value_str(const Value& v);
bool value_equal(const Value& a, const Value& b);

/// Boolean view of a value (bool or Formula). Throws std::runtime_error otherwise.
sym::Formula as_formula(const Value& v);
/// Numeric view. Throws std::runtime_error otherwise.
const sym::Poly& as_poly(const Value& v);

}  // namespace plcnet::exec
