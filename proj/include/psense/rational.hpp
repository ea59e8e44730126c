#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace psense {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>;

// Parses "12", "-3", "0.03", "1.5e-2" or "p/q" exactly.
Rational parse_rational(std::string_view text);

// Exact text form: "p" or "p/q".
std::string to_string(const Rational& value);

// Human-readable decimal with `digits` significant digits; handles magnitudes
// far outside the double range.
std::string to_decimal(const Rational& value, int digits = 6);

double to_double(const Rational& value);

Rational from_double(double value);

Integer floor_int(const Rational& value);
Integer ceil_int(const Rational& value);

// Smallest multiple of 10^-digits that is >= sqrt(value).
Rational sqrt_upper(const Rational& value, unsigned digits = 6);

Rational pow(const Rational& base, unsigned long exponent);

// Outward rounding to `bits` significant binary digits.
Rational round_down(const Rational& value, unsigned bits);
Rational round_up(const Rational& value, unsigned bits);

}  // namespace psense
