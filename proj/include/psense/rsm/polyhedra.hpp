#pragma once

#include "psense/lp/solver.hpp"
#include "psense/model/loop_model.hpp"

#include <optional>
#include <vector>

namespace psense::rsm {

// Polyhedron over (program variables, the sampling columns a resolution
// reads). Local dimension n + k maps to global column columns[k].
struct JointPolyhedron {
  lp::LinearConstraintSystem system;
  std::vector<std::size_t> columns;
};

lp::LinearConstraintSystem guard_polyhedron(const model::LoopModel& model, std::size_t disjunct);

// Guard disjunct times the support box of the columns resolution `res` reads.
JointPolyhedron step_polyhedron(const model::LoopModel& model, std::size_t res, std::size_t disjunct);

// Step polyhedron restricted to F(res, v, r) landing in negated-guard
// disjunct `exit`; std::nullopt when that set is empty (strict rows honoured).
std::optional<JointPolyhedron> exit_polyhedron(const model::LoopModel& model, std::size_t res,
                                               std::size_t disjunct, std::size_t exit,
                                               const lp::LpOptions& options);

// Guard disjuncts that contain at least one state.
std::vector<std::size_t> live_disjuncts(const model::LoopModel& model, const lp::LpOptions& options);

// Row (coeffs . v <= bound) pulled back through F(res, ., .) into joint
// coordinates of `poly`: (coeffs B) v + (coeffs C) r <= bound - coeffs . offset.
lp::Constraint pull_back(const model::LoopModel& model, std::size_t res, const model::LinearRow& row,
                         const JointPolyhedron& poly);

}  // namespace psense::rsm
