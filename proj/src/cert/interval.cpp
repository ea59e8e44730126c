#include "psense/cert/interval.hpp"

#include <stdexcept>

namespace psense::cert {

namespace {

Rational abs_value(const Rational& x) { return x < 0 ? Rational(-x) : x; }

Interval square(const Interval& v, unsigned bits) {
  // Both ends stay positive for exp.
  return {round_down(v.lo * v.lo, bits), round_up(v.hi * v.hi, bits)};
}

}  // namespace

Interval exp_interval(const Rational& x, unsigned bits) {
  if (x == 0) return {Rational(1), Rational(1)};
  // exp(x) = exp(x / 2^k)^(2^k) with |x / 2^k| <= 1/2.
  unsigned long halvings = 0;
  Rational y = x;
  while (abs_value(y) > Rational(1, 2)) {
    y /= 2;
    ++halvings;
  }
  // Taylor series of exp(y); for |y| <= 1/2 the tail after term m is at
  // most 2 |y|^(m+1) / (m+1)!.
  Rational sum = 1;
  Rational term = 1;
  Rational tolerance = Rational(1) / pow(Rational(2), bits + 8);
  unsigned long m = 0;
  Rational tail;
  do {
    ++m;
    term *= y / Rational(m);
    sum += term;
    tail = 2 * abs_value(term) * abs_value(y) / Rational(m + 1);
  } while (tail > tolerance);
  Interval out{round_down(sum - tail, bits), round_up(sum + tail, bits)};
  if (out.lo <= 0) throw std::logic_error("exp enclosure lost positivity");
  for (unsigned long i = 0; i < halvings; ++i) out = square(out, bits);
  return out;
}

Rational pow_upper(const Rational& base, unsigned long exponent, unsigned bits) {
  if (base < 0) throw std::invalid_argument("pow_upper needs a non-negative base");
  Rational result = 1;
  Rational factor = base;
  while (exponent > 0) {
    if (exponent & 1UL) result = round_up(result * factor, bits);
    exponent >>= 1;
    if (exponent > 0) factor = round_up(factor * factor, bits);
  }
  return result;
}

}  // namespace psense::cert
