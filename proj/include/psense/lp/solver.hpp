#pragma once

#include "psense/lp/constraint_system.hpp"

#include <string>

namespace psense::lp {

enum class Sense { Minimize, Maximize };
enum class LpStatus { Optimal, Infeasible, Unbounded };
enum class LpMode { Exact, Float };

std::string to_string(LpStatus status);

struct LpOptions {
  LpMode mode = LpMode::Exact;
  // When set, every solved LP is written here as plain text.
  std::string dump_directory;
  std::string dump_tag = "lp";
};

// Exact mode unless PSENSE_LP_MODE=float.
LpOptions default_lp_options();

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  RationalVector point;
  Rational value;
  bool numeric = false;  // produced by the floating-point fallback
};

// Simplex with Bland's rule. Without an objective the LP is a feasibility
// query. Rows of the form -x <= 0 are turned into variable bounds.
LpOutcome lp_solve(const LinearConstraintSystem& system, const std::optional<LinearObjective>& objective,
                   Sense sense, const LpOptions& options = default_lp_options());

bool polyhedron_nonempty(const LinearConstraintSystem& polyhedron, const LpOptions& options = default_lp_options());

// Nonemptiness honouring strict rows exactly.
bool strictly_feasible(const LinearConstraintSystem& polyhedron, const LpOptions& options = default_lp_options());

// Decides P subset-of {x : c.x <= d}. Throws EmptyPolyhedron for empty P.
bool check_inclusion(const LinearConstraintSystem& polyhedron, const RationalVector& c, const Rational& d,
                     const LpOptions& options = default_lp_options());

std::string to_lp_text(const LinearConstraintSystem& system, const std::optional<LinearObjective>& objective,
                       Sense sense, const std::string& title = "");

}  // namespace psense::lp
