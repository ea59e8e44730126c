#include "psense/lp/farkas.hpp"

namespace psense::lp {

ParamExpr ParamExpr::of_constant(Rational value) {
  ParamExpr e;
  e.constant = std::move(value);
  return e;
}

ParamExpr ParamExpr::of_parameter(std::size_t index, Rational coeff) {
  ParamExpr e;
  e.terms.push_back({index, std::move(coeff)});
  return e;
}

ParamExpr& ParamExpr::add(const ParamExpr& other, const Rational& factor) {
  if (factor == 0) return *this;
  for (const auto& t : other.terms) terms.push_back({t.var, t.coeff * factor});
  terms = compact(std::move(terms));
  constant += other.constant * factor;
  return *this;
}

Rational ParamExpr::evaluate(const RationalVector& parameters) const {
  Rational value = constant;
  for (const auto& t : terms) value += t.coeff * parameters[t.var];
  return value;
}

void append_inclusion_template(LinearConstraintSystem& target, const LinearConstraintSystem& polyhedron,
                               const TemplateHalfspace& halfspace, const std::string& tag) {
  if (halfspace.coeffs.size() != polyhedron.variable_count())
    throw LpError("template halfspace has " + std::to_string(halfspace.coeffs.size()) +
                  " coefficients for a polyhedron of dimension " + std::to_string(polyhedron.variable_count()));
  const auto& rows = polyhedron.constraints();
  std::vector<std::size_t> multiplier(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    multiplier[i] = target.add_variable(tag + ".y" + std::to_string(i));
    if (rows[i].relation == Relation::LessEqual) target.add_less_equal({{multiplier[i], Rational(-1)}}, Rational(0));
  }
  // Column k of A^T y minus c_k(theta) must vanish.
  std::vector<std::vector<Term>> columns(polyhedron.variable_count());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& t : rows[i].terms) columns[t.var].push_back({multiplier[i], t.coeff});
  for (std::size_t k = 0; k < columns.size(); ++k) {
    std::vector<Term> terms = columns[k];
    for (const auto& t : halfspace.coeffs[k].terms) terms.push_back({t.var, -t.coeff});
    terms = compact(std::move(terms));
    Rational rhs = halfspace.coeffs[k].constant;
    if (terms.empty()) {
      if (rhs != 0) {
        // 0 = c_k is unsatisfiable; keep it visible to the solver.
        target.add_equal({}, rhs);
      }
      continue;
    }
    target.add_equal(std::move(terms), rhs);
  }
  // b^T y - d(theta) <= d_constant.
  std::vector<Term> terms;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].bound != 0) terms.push_back({multiplier[i], rows[i].bound});
  for (const auto& t : halfspace.bound.terms) terms.push_back({t.var, -t.coeff});
  target.add_less_equal(std::move(terms), halfspace.bound.constant);
}

LinearConstraintSystem encode_inclusion_template(const LinearConstraintSystem& polyhedron,
                                                 const TemplateHalfspace& halfspace,
                                                 const std::vector<std::string>& parameter_names) {
  LinearConstraintSystem system(parameter_names);
  append_inclusion_template(system, polyhedron, halfspace, "farkas");
  return system;
}

}  // namespace psense::lp
