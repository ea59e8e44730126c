#include "psense/distribution.hpp"

#include <algorithm>
#include <stdexcept>

namespace psense {

std::string to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::Uniform: return "unif";
    case DistributionKind::Bernoulli: return "bern";
    case DistributionKind::Dirac: return "dirac";
    case DistributionKind::Discrete: return "discrete";
  }
  return "unknown";
}

std::string DistributionSpec::describe() const {
  switch (kind) {
    case DistributionKind::Uniform:
      return "unif(" + to_decimal(support_lo, 12) + ", " + to_decimal(support_hi, 12) + ")";
    case DistributionKind::Bernoulli:
      return "bern(" + to_decimal(mean, 12) + ")";
    case DistributionKind::Dirac:
      return "dirac(" + to_decimal(mean, 12) + ")";
    case DistributionKind::Discrete: {
      std::string out = "discrete{";
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (i > 0) out += ", ";
        out += to_decimal(atoms[i].first, 12) + ": " + to_decimal(atoms[i].second, 12);
      }
      return out + "}";
    }
  }
  return "?";
}

DistributionSpec make_uniform(const Rational& lo, const Rational& hi) {
  if (!(lo < hi)) throw std::invalid_argument("unif(a, b) requires a < b");
  DistributionSpec spec;
  spec.kind = DistributionKind::Uniform;
  spec.support_lo = lo;
  spec.support_hi = hi;
  spec.mean = (lo + hi) / 2;
  spec.density_bound = Rational(1) / (hi - lo);
  return spec;
}

DistributionSpec make_bernoulli(const Rational& p) {
  if (p < 0 || p > 1) throw std::invalid_argument("bern(p) requires 0 <= p <= 1");
  DistributionSpec spec;
  spec.kind = DistributionKind::Bernoulli;
  spec.support_lo = p == 1 ? Rational(1) : Rational(0);
  spec.support_hi = p == 0 ? Rational(0) : Rational(1);
  spec.mean = p;
  spec.atoms = {{Rational(0), Rational(1) - p}, {Rational(1), p}};
  return spec;
}

DistributionSpec make_dirac(const Rational& value) {
  DistributionSpec spec;
  spec.kind = DistributionKind::Dirac;
  spec.support_lo = value;
  spec.support_hi = value;
  spec.mean = value;
  spec.atoms = {{value, Rational(1)}};
  return spec;
}

DistributionSpec make_discrete(std::vector<std::pair<Rational, Rational>> atoms) {
  if (atoms.empty()) throw std::invalid_argument("discrete{} needs at least one atom");
  Rational total = 0;
  Rational mean = 0;
  for (const auto& [value, prob] : atoms) {
    if (prob < 0) throw std::invalid_argument("discrete{} has a negative probability");
    total += prob;
    mean += value * prob;
  }
  if (total != 1) throw std::invalid_argument("discrete{} probabilities sum to " + to_string(total) + ", not 1");
  DistributionSpec spec;
  spec.kind = DistributionKind::Discrete;
  spec.mean = mean;
  bool first = true;
  for (const auto& [value, prob] : atoms) {
    if (prob == 0) continue;
    if (first || value < spec.support_lo) spec.support_lo = value;
    if (first || value > spec.support_hi) spec.support_hi = value;
    first = false;
  }
  spec.atoms = std::move(atoms);
  return spec;
}

}  // namespace psense
