#include "psense/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace psense {

namespace {

Integer pow10(unsigned long exponent) {
  Integer result = 1;
  Integer base = 10;
  while (exponent > 0) {
    if (exponent & 1U) result *= base;
    base *= base;
    exponent >>= 1U;
  }
  return result;
}

// Number of decimal digits of a positive integer.
long decimal_digits(const Integer& value) { return static_cast<long>(value.str().size()); }

}  // namespace

Rational parse_rational(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty number");
  auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    Rational num = parse_rational(text.substr(0, slash));
    Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return num / den;
  }
  bool negative = false;
  std::size_t pos = 0;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  std::string digits;
  long scale = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; pos < text.size(); ++pos) {
    char ch = text[pos];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits.push_back(ch);
      any_digit = true;
      if (seen_point) ++scale;
    } else if (ch == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw std::invalid_argument("malformed number '" + std::string(text) + "'");
  long exponent = 0;
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E')
      throw std::invalid_argument("malformed number '" + std::string(text) + "'");
    ++pos;
    std::string exp_text(text.substr(pos));
    if (exp_text.empty()) throw std::invalid_argument("malformed exponent in '" + std::string(text) + "'");
    std::size_t used = 0;
    exponent = std::stol(exp_text, &used);
    if (used != exp_text.size())
      throw std::invalid_argument("malformed exponent in '" + std::string(text) + "'");
  }
  // Leading zeros would make the integer parser read octal.
  std::size_t first = digits.find_first_not_of('0');
  digits = first == std::string::npos ? "0" : digits.substr(first);
  Rational value{Integer(digits)};
  long shift = exponent - scale;
  if (shift > 0) value *= Rational(pow10(static_cast<unsigned long>(shift)));
  if (shift < 0) value /= Rational(pow10(static_cast<unsigned long>(-shift)));
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& value) {
  Integer num = boost::multiprecision::numerator(value);
  Integer den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::string to_decimal(const Rational& value, int digits) {
  if (digits < 1) digits = 1;
  if (value == 0) return "0";
  bool negative = value < 0;
  Rational magnitude = negative ? Rational(-value) : value;
  Integer num = boost::multiprecision::numerator(magnitude);
  Integer den = boost::multiprecision::denominator(magnitude);
  // Estimate the decimal exponent, then correct it.
  long exponent = decimal_digits(num) - decimal_digits(den);
  auto scaled_integer = [&](long exp10) {
    // floor(magnitude * 10^(digits-1-exp10)) rounded to nearest.
    long shift = digits - 1 - exp10;
    Integer n = num;
    Integer d = den;
    if (shift >= 0) n *= pow10(static_cast<unsigned long>(shift));
    else d *= pow10(static_cast<unsigned long>(-shift));
    Integer q = (2 * n + d) / (2 * d);
    return q;
  };
  Integer mantissa = scaled_integer(exponent);
  Integer lower = pow10(static_cast<unsigned long>(digits - 1));
  Integer upper = pow10(static_cast<unsigned long>(digits));
  while (mantissa >= upper) {
    ++exponent;
    mantissa = scaled_integer(exponent);
  }
  while (mantissa < lower) {
    --exponent;
    mantissa = scaled_integer(exponent);
    if (mantissa >= upper) {
      ++exponent;
      mantissa = scaled_integer(exponent);
      break;
    }
  }
  std::string text = mantissa.str();
  std::string out;
  if (exponent >= -5 && exponent < 15) {
    if (exponent >= 0) {
      auto int_len = static_cast<std::size_t>(exponent + 1);
      if (text.size() < int_len) text.append(int_len - text.size(), '0');
      out = text.substr(0, int_len);
      std::string frac = text.substr(int_len);
      while (!frac.empty() && frac.back() == '0') frac.pop_back();
      if (!frac.empty()) out += "." + frac;
    } else {
      std::string frac = std::string(static_cast<std::size_t>(-exponent - 1), '0') + text;
      while (!frac.empty() && frac.back() == '0') frac.pop_back();
      out = "0." + frac;
    }
  } else {
    std::string frac = text.substr(1);
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    out = text.substr(0, 1);
    if (!frac.empty()) out += "." + frac;
    out += "e" + std::string(exponent >= 0 ? "+" : "") + std::to_string(exponent);
  }
  return negative ? "-" + out : out;
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

Rational from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite value has no rational form");
  return Rational(value);
}

Integer floor_int(const Rational& value) {
  Integer num = boost::multiprecision::numerator(value);
  Integer den = boost::multiprecision::denominator(value);
  Integer q = num / den;
  if (q * den != num && num < 0) --q;
  return q;
}

Integer ceil_int(const Rational& value) {
  Integer q = floor_int(value);
  if (Rational(q) != value) ++q;
  return q;
}

Rational sqrt_upper(const Rational& value, unsigned digits) {
  if (value < 0) throw std::invalid_argument("sqrt of negative value");
  Integer scale = pow10(digits);
  Integer target = ceil_int(value * Rational(scale * scale));
  Integer root = boost::multiprecision::sqrt(target);
  if (root * root < target) ++root;
  return Rational(root) / Rational(scale);
}

Rational pow(const Rational& base, unsigned long exponent) {
  Rational result = 1;
  Rational factor = base;
  while (exponent > 0) {
    if (exponent & 1U) result *= factor;
    exponent >>= 1U;
    if (exponent > 0) factor *= factor;
  }
  return result;
}

namespace {

// Returns floor or ceil of value * 2^shift as an integer, then rescales.
Rational round_binary(const Rational& value, unsigned bits, bool upward) {
  if (value == 0) return value;
  Integer num = boost::multiprecision::numerator(value);
  Integer den = boost::multiprecision::denominator(value);
  long num_bits = static_cast<long>(boost::multiprecision::msb(boost::multiprecision::abs(num))) + 1;
  long den_bits = static_cast<long>(boost::multiprecision::msb(den)) + 1;
  long shift = static_cast<long>(bits) - (num_bits - den_bits);
  Integer n = num;
  Integer d = den;
  if (shift >= 0) n <<= static_cast<unsigned>(shift);
  else d <<= static_cast<unsigned>(-shift);
  Rational scaled(n, d);
  Integer rounded = upward ? ceil_int(scaled) : floor_int(scaled);
  Rational out(rounded);
  if (shift >= 0) out /= Rational(Integer(1) << static_cast<unsigned>(shift));
  else out *= Rational(Integer(1) << static_cast<unsigned>(-shift));
  return out;
}

}  // namespace

Rational round_down(const Rational& value, unsigned bits) { return round_binary(value, bits, false); }
Rational round_up(const Rational& value, unsigned bits) { return round_binary(value, bits, true); }

}  // namespace psense
