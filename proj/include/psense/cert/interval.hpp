#pragma once

#include "psense/rational.hpp"

namespace psense::cert {

// Closed rational interval [lo, hi].
struct Interval {
  Rational lo;
  Rational hi;

  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  Rational width() const { return hi - lo; }
};

// Enclosure of exp(x). Intermediate values are rounded outward to `bits`
// binary digits, so the result is sound but not tight below that precision.
Interval exp_interval(const Rational& x, unsigned bits = 128);

// Upper bound of base^exponent for base >= 0 with outward rounding.
Rational pow_upper(const Rational& base, unsigned long exponent, unsigned bits = 128);

}  // namespace psense::cert
