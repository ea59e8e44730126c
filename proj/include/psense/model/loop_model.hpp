#pragma once

#include "psense/distribution.hpp"
#include "psense/dsl/ast.hpp"
#include "psense/model/guard.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace psense::model {

// One read site of a sampling variable inside a loop body. Each read is an
// independent sample, so every site is its own column of C.
struct SamplingColumn {
  std::string variable;
  DistributionSpec distribution;
  dsl::SourceSpan span;
};

// v' = B v + C r + offset.
struct AffineUpdate {
  RationalMatrix B;
  RationalMatrix C;
  RationalVector offset;

  RationalVector apply(const RationalVector& v, const RationalVector& r) const;
};

struct Resolution {
  std::size_t id = 0;
  Rational probability;
  AffineUpdate update;
  std::string path;  // branch choices, e.g. "LR" = then, else
  std::vector<std::size_t> columns_used;
};

struct LoopModel {
  std::size_t loop_index = 0;
  dsl::SourceSpan span;
  std::vector<std::string> program_variables;
  std::vector<SamplingColumn> columns;
  GuardDnf guard;
  GuardDnf negated_guard;
  std::vector<Resolution> resolutions;
  std::string guard_text;

  std::size_t dimension() const { return program_variables.size(); }
  std::size_t variable_index(const std::string& name) const;
};

inline constexpr std::size_t kMaxResolutions = 4096;

class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ResolutionBlowup : public ExtractionError {
 public:
  using ExtractionError::ExtractionError;
};

// Program variables in order of first appearance.
std::vector<std::string> collect_program_variables(const dsl::Program& program);

// One model per top-level while loop, in source order.
std::vector<LoopModel> extract_models(const dsl::Program& program);

nlohmann::json to_json(const LoopModel& model);

}  // namespace psense::model
