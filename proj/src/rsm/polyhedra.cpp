#include "psense/rsm/polyhedra.hpp"

namespace psense::rsm {

namespace {

void add_row(lp::LinearConstraintSystem& system, const model::LinearRow& row) {
  std::vector<lp::Term> terms;
  for (std::size_t k = 0; k < row.coeffs.size(); ++k)
    if (row.coeffs[k] != 0) terms.push_back({k, row.coeffs[k]});
  system.add_less_equal(std::move(terms), row.bound, row.strict);
}

}  // namespace

lp::LinearConstraintSystem guard_polyhedron(const model::LoopModel& model, std::size_t disjunct) {
  lp::LinearConstraintSystem system(model.program_variables);
  for (const auto& row : model.guard.disjuncts.at(disjunct).rows) add_row(system, row);
  return system;
}

JointPolyhedron step_polyhedron(const model::LoopModel& model, std::size_t res, std::size_t disjunct) {
  JointPolyhedron poly{guard_polyhedron(model, disjunct), model.resolutions.at(res).columns_used};
  for (std::size_t q = 0; q < poly.columns.size(); ++q) {
    const auto& column = model.columns[poly.columns[q]];
    std::size_t var = poly.system.add_variable(column.variable + "#" + std::to_string(poly.columns[q]));
    poly.system.add_less_equal({{var, Rational(1)}}, column.distribution.support_hi);
    poly.system.add_less_equal({{var, Rational(-1)}}, -column.distribution.support_lo);
  }
  return poly;
}

lp::Constraint pull_back(const model::LoopModel& model, std::size_t res, const model::LinearRow& row,
                         const JointPolyhedron& poly) {
  const auto& update = model.resolutions.at(res).update;
  std::size_t n = model.dimension();
  lp::Constraint out;
  out.relation = lp::Relation::LessEqual;
  out.strict = row.strict;
  out.bound = row.bound;
  for (std::size_t z = 0; z < n; ++z) {
    if (row.coeffs[z] == 0) continue;
    out.bound -= row.coeffs[z] * update.offset[z];
    for (std::size_t k = 0; k < n; ++k)
      if (update.B[z][k] != 0) out.terms.push_back({k, row.coeffs[z] * update.B[z][k]});
    for (std::size_t q = 0; q < poly.columns.size(); ++q) {
      const Rational& c = update.C[z][poly.columns[q]];
      if (c != 0) out.terms.push_back({n + q, row.coeffs[z] * c});
    }
  }
  out.terms = lp::compact(std::move(out.terms));
  return out;
}

std::optional<JointPolyhedron> exit_polyhedron(const model::LoopModel& model, std::size_t res,
                                               std::size_t disjunct, std::size_t exit,
                                               const lp::LpOptions& options) {
  JointPolyhedron poly = step_polyhedron(model, res, disjunct);
  for (const auto& row : model.negated_guard.disjuncts.at(exit).rows)
    poly.system.add(pull_back(model, res, row, poly));
  if (!lp::strictly_feasible(poly.system, options)) return std::nullopt;
  return poly;
}

std::vector<std::size_t> live_disjuncts(const model::LoopModel& model, const lp::LpOptions& options) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < model.guard.disjuncts.size(); ++i)
    if (lp::strictly_feasible(guard_polyhedron(model, i), options)) out.push_back(i);
  return out;
}

}  // namespace psense::rsm
