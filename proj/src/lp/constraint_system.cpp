#include "psense/lp/constraint_system.hpp"

#include <algorithm>
#include <map>

namespace psense::lp {

std::vector<Term> compact(std::vector<Term> terms) {
  std::map<std::size_t, Rational> merged;
  for (auto& t : terms) merged[t.var] += t.coeff;
  std::vector<Term> out;
  for (auto& [var, coeff] : merged)
    if (coeff != 0) out.push_back({var, std::move(coeff)});
  return out;
}

std::size_t LinearConstraintSystem::add_variable(std::string name) {
  variables_.push_back(std::move(name));
  return variables_.size() - 1;
}

void LinearConstraintSystem::add(Constraint constraint) {
  constraint.terms = compact(std::move(constraint.terms));
  for (const auto& t : constraint.terms)
    if (t.var >= variables_.size()) throw LpError("constraint refers to unknown variable index " + std::to_string(t.var));
  constraints_.push_back(std::move(constraint));
}

void LinearConstraintSystem::add_less_equal(std::vector<Term> terms, Rational bound, bool strict) {
  add(Constraint{std::move(terms), Relation::LessEqual, std::move(bound), strict});
}

void LinearConstraintSystem::add_equal(std::vector<Term> terms, Rational bound) {
  add(Constraint{std::move(terms), Relation::Equal, std::move(bound), false});
}

void LinearConstraintSystem::add_dense(const RationalVector& coeffs, Rational bound, bool strict) {
  std::vector<Term> terms;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    if (coeffs[i] != 0) terms.push_back({i, coeffs[i]});
  add_less_equal(std::move(terms), std::move(bound), strict);
}

bool LinearConstraintSystem::has_strict_rows() const {
  return std::any_of(constraints_.begin(), constraints_.end(), [](const Constraint& c) { return c.strict; });
}

Rational LinearObjective::evaluate(const RationalVector& point) const {
  Rational value = constant;
  for (const auto& t : terms) value += t.coeff * point[t.var];
  return value;
}

}  // namespace psense::lp
