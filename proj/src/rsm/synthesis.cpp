#include "psense/rsm/synthesis.hpp"

#include "psense/rsm/polyhedra.hpp"
#include "psense/rsm/side_conditions.hpp"

namespace psense::rsm {

using lp::ParamExpr;
using lp::TemplateHalfspace;

namespace {

ParamExpr eta_coeff(std::size_t k) { return ParamExpr::of_parameter(k); }

// Coefficient of v_k in eta(F(res, v, r)).
ParamExpr after_state_coeff(const model::LoopModel& model, std::size_t res, std::size_t k) {
  const auto& B = model.resolutions[res].update.B;
  ParamExpr e;
  for (std::size_t z = 0; z < model.dimension(); ++z)
    if (B[z][k] != 0) e.terms.push_back({z, B[z][k]});
  return e;
}

// Coefficient of sampling column `col` in eta(F(res, v, r)).
ParamExpr after_sample_coeff(const model::LoopModel& model, std::size_t res, std::size_t col) {
  const auto& C = model.resolutions[res].update.C;
  ParamExpr e;
  for (std::size_t z = 0; z < model.dimension(); ++z)
    if (C[z][col] != 0) e.terms.push_back({z, C[z][col]});
  return e;
}

// sum_z a_z offset_z
ParamExpr after_offset(const model::LoopModel& model, std::size_t res) {
  const auto& offset = model.resolutions[res].update.offset;
  ParamExpr e;
  for (std::size_t z = 0; z < model.dimension(); ++z)
    if (offset[z] != 0) e.terms.push_back({z, offset[z]});
  return e;
}

TemplateHalfspace negated(TemplateHalfspace h) {
  for (auto& c : h.coeffs) {
    ParamExpr neg;
    neg.add(c, Rational(-1));
    c = neg;
  }
  return h;
}

// eta(F) as joint-coordinate coefficients; bound left empty.
TemplateHalfspace eta_after(const model::LoopModel& model, std::size_t res, const JointPolyhedron& poly) {
  TemplateHalfspace h;
  for (std::size_t k = 0; k < model.dimension(); ++k) h.coeffs.push_back(after_state_coeff(model, res, k));
  for (std::size_t col : poly.columns) h.coeffs.push_back(after_sample_coeff(model, res, col));
  return h;
}

}  // namespace

ParamExpr eta_after_constant(const model::LoopModel& model, std::size_t res, const ParameterLayout& layout) {
  ParamExpr e = after_offset(model, res);
  e.add(ParamExpr::of_parameter(layout.offset));
  return e;
}

ConstraintBundle assemble_constraints(const model::LoopModel& model, const SynthesisOptions& options) {
  std::size_t n = model.dimension();
  ConstraintBundle bundle;
  ParameterLayout& layout = bundle.layout;
  layout.dimension = n;
  layout.offset = n;
  layout.K = n + 1;
  std::size_t next = n + 2;
  if (options.mode == SynthesisMode::DifferenceBounded) layout.c = next++;
  layout.abs_start = next;

  auto& sys = bundle.system;
  for (const auto& name : model.program_variables) sys.add_variable("a_" + name);
  sys.add_variable("b");
  sys.add_variable("K");
  if (layout.c) sys.add_variable("c");
  for (const auto& name : model.program_variables) sys.add_variable("abs_a_" + name);

  std::vector<std::size_t> live = live_disjuncts(model, options.lp);
  if (live.empty()) throw EmptyGuard("loop guard '" + model.guard_text + "' is unsatisfiable");

  sys.add_less_equal({{layout.K, Rational(1)}}, Rational(0));
  if (layout.c) sys.add_less_equal({{*layout.c, Rational(-1)}}, Rational(0));
  for (std::size_t z = 0; z < n; ++z) {
    sys.add_less_equal({{z, Rational(1)}, {layout.abs_start + z, Rational(-1)}}, Rational(0));
    sys.add_less_equal({{z, Rational(-1)}, {layout.abs_start + z, Rational(-1)}}, Rational(0));
  }

  // Non-negativity on the guard: -a.v <= b.
  for (std::size_t i : live) {
    TemplateHalfspace h;
    for (std::size_t k = 0; k < n; ++k) h.coeffs.push_back(ParamExpr().add(eta_coeff(k), Rational(-1)));
    h.bound = ParamExpr::of_parameter(layout.offset);
    lp::append_inclusion_template(sys, guard_polyhedron(model, i), h, "nonneg." + std::to_string(i));
  }

  // Bounded exit: K <= eta(F) <= 0 whenever F leaves the guard.
  for (std::size_t res = 0; res < model.resolutions.size(); ++res) {
    for (std::size_t i : live) {
      for (std::size_t j = 0; j < model.negated_guard.disjuncts.size(); ++j) {
        auto poly = exit_polyhedron(model, res, i, j, options.lp);
        if (!poly) {
          ++bundle.skipped_exit_cases;
          continue;
        }
        ++bundle.exit_cases;
        std::string tag = "exit." + std::to_string(res) + "." + std::to_string(i) + "." + std::to_string(j);
        ParamExpr after_const = eta_after_constant(model, res, layout);
        TemplateHalfspace upper = eta_after(model, res, *poly);
        upper.bound = ParamExpr().add(after_const, Rational(-1));
        lp::append_inclusion_template(sys, poly->system, upper, tag + ".upper");
        TemplateHalfspace lower = negated(eta_after(model, res, *poly));
        lower.bound = after_const;
        lower.bound.add(ParamExpr::of_parameter(layout.K), Rational(-1));
        lp::append_inclusion_template(sys, poly->system, lower, tag + ".lower");
      }
    }
  }

  // Expected decrease: sum_l p_l eta(F(l, v, mean)) <= eta(v) - epsilon.
  for (std::size_t i : live) {
    TemplateHalfspace h;
    h.coeffs.assign(n, ParamExpr());
    h.bound = ParamExpr::of_constant(-options.epsilon);
    for (std::size_t res = 0; res < model.resolutions.size(); ++res) {
      const auto& r = model.resolutions[res];
      for (std::size_t k = 0; k < n; ++k) h.coeffs[k].add(after_state_coeff(model, res, k), r.probability);
      ParamExpr mean_part = after_offset(model, res);
      for (std::size_t col : r.columns_used)
        mean_part.add(after_sample_coeff(model, res, col), model.columns[col].distribution.mean);
      h.bound.add(mean_part, -r.probability);
    }
    for (std::size_t k = 0; k < n; ++k) h.coeffs[k].add(eta_coeff(k), Rational(-1));
    lp::append_inclusion_template(sys, guard_polyhedron(model, i), h, "decrease." + std::to_string(i));
  }

  // Difference bound: |eta(F) - eta(v)| <= c.
  if (layout.c) {
    for (std::size_t res = 0; res < model.resolutions.size(); ++res) {
      for (std::size_t i : live) {
        JointPolyhedron poly = step_polyhedron(model, res, i);
        TemplateHalfspace upper = eta_after(model, res, poly);
        for (std::size_t k = 0; k < n; ++k) upper.coeffs[k].add(eta_coeff(k), Rational(-1));
        ParamExpr offs = after_offset(model, res);
        TemplateHalfspace lower = negated(upper);
        upper.bound = ParamExpr::of_parameter(*layout.c);
        upper.bound.add(offs, Rational(-1));
        lower.bound = ParamExpr::of_parameter(*layout.c);
        lower.bound.add(offs);
        std::string tag = "diff." + std::to_string(res) + "." + std::to_string(i);
        lp::append_inclusion_template(sys, poly.system, upper, tag + ".upper");
        lp::append_inclusion_template(sys, poly.system, lower, tag + ".lower");
      }
    }
  }

  for (std::size_t z = 0; z < n; ++z) bundle.objective.terms.push_back({layout.abs_start + z, Rational(1)});
  bundle.objective.terms.push_back({layout.K, Rational(-1)});
  return bundle;
}

RsmWitness synthesize(const model::LoopModel& model, const SynthesisOptions& options) {
  ConstraintBundle bundle = assemble_constraints(model, options);
  lp::LpOptions lp_options = options.lp;
  if (!lp_options.dump_directory.empty()) lp_options.dump_tag = "synthesis_loop" + std::to_string(model.loop_index);
  lp::LpOutcome outcome = lp::lp_solve(bundle.system, bundle.objective, lp::Sense::Minimize, lp_options);
  if (outcome.status != lp::LpStatus::Optimal)
    throw Infeasible("no linear ranking supermartingale with epsilon = " + to_decimal(options.epsilon) +
                     " exists for loop '" + model.guard_text + "'" +
                     (options.mode == SynthesisMode::DifferenceBounded ? " with bounded differences" : ""));
  RsmWitness w;
  w.variables = model.program_variables;
  const auto& layout = bundle.layout;
  for (std::size_t z = 0; z < model.dimension(); ++z) w.eta.coeffs.push_back(outcome.point[layout.coeff(z)]);
  w.eta.offset = outcome.point[layout.offset];
  w.K = outcome.point[layout.K];
  w.epsilon = options.epsilon;
  w.metric = options.metric;
  w.numeric = outcome.numeric;
  w.M = compute_lipschitz_eta(w.eta, w.metric);
  if (layout.c) w.c = compute_difference_bound(model, w.eta, options.lp);
  return w;
}

}  // namespace psense::rsm
