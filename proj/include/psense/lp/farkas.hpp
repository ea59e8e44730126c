#pragma once

#include "psense/lp/constraint_system.hpp"

#include <string>
#include <vector>

namespace psense::lp {

// Affine expression over template parameters.
struct ParamExpr {
  std::vector<Term> terms;
  Rational constant;

  static ParamExpr of_constant(Rational value);
  static ParamExpr of_parameter(std::size_t index, Rational coeff = 1);
  ParamExpr& add(const ParamExpr& other, const Rational& factor = 1);
  Rational evaluate(const RationalVector& parameters) const;
};

// c(theta) . x <= d(theta), one coefficient per dimension of the polyhedron.
struct TemplateHalfspace {
  std::vector<ParamExpr> coeffs;
  ParamExpr bound;
};

// Conditions on theta equivalent to P subset-of the halfspace, for nonempty
// P: y >= 0 (free for equality rows), A^T y = c(theta), b^T y <= d(theta).
// Variables are the parameters followed by one multiplier per row of P.
LinearConstraintSystem encode_inclusion_template(const LinearConstraintSystem& polyhedron,
                                                 const TemplateHalfspace& halfspace,
                                                 const std::vector<std::string>& parameter_names);

// Same encoding appended to `target`, whose first variables are the
// parameters; multipliers are added as fresh variables named after `tag`.
void append_inclusion_template(LinearConstraintSystem& target, const LinearConstraintSystem& polyhedron,
                               const TemplateHalfspace& halfspace, const std::string& tag);

}  // namespace psense::lp
