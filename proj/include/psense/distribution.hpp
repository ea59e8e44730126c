#pragma once

#include "psense/rational.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace psense {

enum class DistributionKind { Uniform, Bernoulli, Dirac, Discrete };

std::string to_string(DistributionKind kind);

// A sampling distribution with its support interval, mean and (for
// continuous kinds) a bound on the density.
struct DistributionSpec {
  DistributionKind kind = DistributionKind::Dirac;
  Rational support_lo;
  Rational support_hi;
  Rational mean;
  std::optional<Rational> density_bound;
  // Atoms of discrete kinds, as (value, probability); empty for uniform.
  std::vector<std::pair<Rational, Rational>> atoms;

  bool continuous() const { return kind == DistributionKind::Uniform; }
  std::string describe() const;
};

DistributionSpec make_uniform(const Rational& lo, const Rational& hi);
DistributionSpec make_bernoulli(const Rational& p);
DistributionSpec make_dirac(const Rational& value);
DistributionSpec make_discrete(std::vector<std::pair<Rational, Rational>> atoms);

}  // namespace psense
