#include "bellwright/rational.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "bellwright/errors.hpp"

namespace bellwright {

Rational make_rational(long num, long den) {
  if (den == 0) throw ParseError("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty()) throw ParseError("empty rational literal");
  for (std::size_t k = 0; k < s.size(); ++k) {
    char c = s[k];
    bool ok = std::isdigit(static_cast<unsigned char>(c)) || c == '/' ||
              ((c == '-' || c == '+') && (k == 0 || s[k - 1] == '/'));
    if (!ok) throw ParseError("malformed rational literal: " + text);
  }
  Rational q;
  if (q.set_str(s, 10) != 0) throw ParseError("malformed rational literal: " + text);
  if (q.get_den() == 0) throw ParseError("rational with zero denominator: " + text);
  q.canonicalize();
  return q;
}

std::string format_rational(const Rational& q) { return q.get_str(); }

Rational round_to_denominator(double x, std::uint64_t denominator) {
  if (denominator == 0) throw ParseError("zero rounding denominator");
  double scaled = x * static_cast<double>(denominator);
  double n = std::round(scaled);  // ties away from zero
  mpz_class num(n);
  mpz_class den = mpz_class(static_cast<unsigned long>(denominator));
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string format_number(double x, int max_digits) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.setf(std::ios::fixed);
  os.precision(max_digits);
  os << x;
  std::string s = os.str();
  if (s.find('.') != std::string::npos) {
    std::size_t last = s.find_last_not_of('0');
    if (s[last] == '.') last -= 1;
    s.erase(last + 1);
  }
  if (s == "-0") s = "0";
  return s;
}

}  // namespace bellwright
