#include "core/rational.hpp"

#include <cctype>

namespace plcnet {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&]() { return std::invalid_argument("not a rational number: '" + s + "'"); };
  if (s.empty()) throw bad();
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    bool neg = s[0] == '-';
    std::string digits;
    std::size_t scale = 0;
    for (std::size_t i = neg || s[0] == '+' ? 1 : 0; i < s.size(); ++i) {
      if (i == dot) continue;
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) throw bad();
      digits.push_back(s[i]);
      if (i > dot) ++scale;
    }
    if (digits.empty()) throw bad();
    mpz_class num(digits, 10);
    mpz_class den = 1;
    for (std::size_t i = 0; i < scale; ++i) den *= 10;
    Rational q(num, den);
    q.canonicalize();
    return neg ? Rational(-q) : q;
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '/' || (i == 0 && (c == '-' || c == '+'))) continue;
    throw bad();
  }
  try {
    Rational q(s[0] == '+' ? s.substr(1) : s, 10);
    if (q.get_den() == 0) throw bad();
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw bad();
  }
}

std::string to_string(const Rational& q) { return q.get_str(10); }

TimeBound min(const TimeBound& a, const TimeBound& b) {
  if (a.is_infinite()) return b;
  if (b.is_infinite()) return a;
  return TimeBound{*a.value < *b.value ? *a.value : *b.value};
}

Rational monus(const Rational& x, const Rational& y) {
  Rational d = x - y;
  return d > 0 ? d : Rational(0);
}

}  // namespace plcnet
