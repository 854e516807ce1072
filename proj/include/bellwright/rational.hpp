#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace bellwright {

// All probability arithmetic in the library runs on exact rationals.
using Rational = mpq_class;

// mpq_class(n, d) does not canonicalize on its own; route every
// numerator/denominator construction through here.
Rational make_rational(long num, long den);

// Parses "num/den" or a plain integer string. Throws ParseError on
// malformed input or a zero denominator.
Rational parse_rational(const std::string& text);

// Canonical "num/den" form ("3/8", "1", "-1/2").
std::string format_rational(const Rational& q);

// Nearest rational with the given denominator, ties away from zero.
Rational round_to_denominator(double x, std::uint64_t denominator);

// Fixed-decimal, locale-independent rendering with trailing zeros trimmed;
// never switches to scientific notation.
std::string format_number(double x, int max_digits = 9);

}  // namespace bellwright
