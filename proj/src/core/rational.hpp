#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace plcnet {

/// Exact rational number used for all time and physical quantities.
using Rational = mpq_class;

/// Parses "3", "-2/5", "0.25" into an exact rational. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// Canonical text: integers print without denominator, otherwise "p/q".
std::string to_string(const Rational& q);

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

/// Time value that may be unbounded (mte of an empty configuration).
struct TimeBound {
  std::optional<Rational> value;  // nullopt == infinity

  static TimeBound infinity() { return {}; }
  bool is_infinite() const { return !value.has_value(); }
};

TimeBound min(const TimeBound& a, const TimeBound& b);

/// x monus y = max(x - y, 0)
Rational monus(const Rational& x, const Rational& y);

}  // namespace plcnet
