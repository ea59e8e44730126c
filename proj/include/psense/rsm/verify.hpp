#pragma once

#include "psense/lp/solver.hpp"
#include "psense/model/loop_model.hpp"
#include "psense/rsm/witness.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace psense::rsm {

// One RSM condition re-checked by direct optimisation. The margin is the
// slack of the condition (negative when violated); std::nullopt means the
// relevant optimum is unbounded.
struct ConditionResult {
  std::string name;
  std::string description;
  bool checked = false;
  std::optional<Rational> margin;
  std::size_t cases = 0;

  bool passed(const Rational& tolerance) const { return !checked || (margin && *margin >= -tolerance); }
};

struct VerificationReport {
  std::vector<ConditionResult> conditions;
  Rational tolerance;

  bool passed() const;
  const ConditionResult& condition(const std::string& name) const;
};

// Checks non-negativity (A1), bounded exit (A2), expected decrease (A3) and,
// when the witness carries c, the difference bound (A4).
VerificationReport verify_witness(const model::LoopModel& model, const RsmWitness& witness,
                                  const Rational& tolerance = 0,
                                  const lp::LpOptions& options = lp::default_lp_options());

nlohmann::json to_json(const VerificationReport& report);

}  // namespace psense::rsm
