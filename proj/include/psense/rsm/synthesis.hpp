#pragma once

#include "psense/lp/farkas.hpp"
#include "psense/lp/solver.hpp"
#include "psense/model/loop_model.hpp"
#include "psense/rsm/witness.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace psense::rsm {

enum class SynthesisMode {
  Plain,              // non-negativity, bounded exit, expected decrease
  DifferenceBounded,  // additionally |eta(F) - eta(v)| <= c
};

struct SynthesisOptions {
  SynthesisMode mode = SynthesisMode::Plain;
  Rational epsilon = 1;
  Metric metric = Metric::max_norm();
  lp::LpOptions lp = lp::default_lp_options();
};

class SynthesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Infeasible : public SynthesisError {
 public:
  using SynthesisError::SynthesisError;
};

class EmptyGuard : public SynthesisError {
 public:
  using SynthesisError::SynthesisError;
};

// Template parameters: a_0..a_{n-1}, b, K, then c in difference-bounded
// mode, then one |a_z| bound per variable; Farkas multipliers follow.
struct ParameterLayout {
  std::size_t dimension = 0;
  std::size_t offset = 0;
  std::size_t K = 0;
  std::optional<std::size_t> c;
  std::size_t abs_start = 0;

  std::size_t coeff(std::size_t z) const { return z; }
  std::size_t count() const { return abs_start + dimension; }
};

struct ConstraintBundle {
  lp::LinearConstraintSystem system;
  ParameterLayout layout;
  lp::LinearObjective objective;
  std::size_t exit_cases = 0;
  std::size_t skipped_exit_cases = 0;
};

ConstraintBundle assemble_constraints(const model::LoopModel& model, const SynthesisOptions& options = {});

// Minimises |a|_1 - K. In difference-bounded mode the returned c is the
// tightest bound for the synthesized eta.
RsmWitness synthesize(const model::LoopModel& model, const SynthesisOptions& options = {});

// Template pieces over the parameter layout, exposed for tests.
lp::ParamExpr eta_after_constant(const model::LoopModel& model, std::size_t res, const ParameterLayout& layout);

}  // namespace psense::rsm
