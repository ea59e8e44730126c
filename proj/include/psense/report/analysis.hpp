#pragma once

#include "psense/cert/certificate.hpp"
#include "psense/dsl/ast.hpp"
#include "psense/dsl/validate.hpp"
#include "psense/lp/solver.hpp"
#include "psense/model/loop_model.hpp"
#include "psense/rsm/side_conditions.hpp"
#include "psense/rsm/verify.hpp"
#include "psense/rsm/witness.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace psense::report {

enum class RequestedKind { Affine, Linear, Expansive, Auto };

RequestedKind requested_kind_from_string(const std::string& text);

struct AnalysisOptions {
  RequestedKind kind = RequestedKind::Auto;
  rsm::MetricKind metric = rsm::MetricKind::Max;
  std::optional<RationalVector> center;
  bool assert_range = false;
  lp::LpOptions lp = lp::default_lp_options();
};

// Raised for programs that fail parsing or validation.
class InvalidProgram : public std::runtime_error {
 public:
  InvalidProgram(const std::string& message, std::vector<std::string> diagnostics)
      : std::runtime_error(message), diagnostics_(std::move(diagnostics)) {}
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

struct StageTimings {
  double parse = 0;
  double extract = 0;
  double lp = 0;
  double verify = 0;
  double certify = 0;

  double total() const { return parse + extract + lp + verify + certify; }
};

struct LoopAnalysis {
  model::LoopModel model;
  std::optional<rsm::RsmWitness> witness;
  std::optional<rsm::VerificationReport> verification;
  std::optional<rsm::NextStepLipschitz> next_step;
  std::vector<std::string> notes;
};

struct AnalysisReport {
  std::string program_id;
  std::string program_hash;
  std::vector<std::string> variables;
  std::vector<LoopAnalysis> loops;
  std::optional<cert::Certificate> certificate;
  std::string failure;  // empty on success
  std::string failed_prerequisite;  // e.g. "B4", "d", "L <= 1"
  std::vector<std::string> warnings;
  StageTimings timings;

  bool certified() const { return certificate.has_value(); }
};

// FNV-1a 64 of the pretty-printed program, as 16 hex digits.
std::string program_hash(const dsl::Program& program);

// Parses, validates and extracts; throws InvalidProgram.
dsl::Program load_program(std::string_view text, const std::string& source_name,
                          std::vector<dsl::Diagnostic>* warnings = nullptr);

// Runs synthesis, side conditions and theorem dispatch. Certification
// failures are reported in `failure`, not thrown.
AnalysisReport certify_program(const dsl::Program& program, const std::string& program_id,
                               const AnalysisOptions& options);

// load_program + certify_program, with the parse stage timed.
AnalysisReport certify_source(std::string_view text, const std::string& source_name, const std::string& program_id,
                              const AnalysisOptions& options);

nlohmann::json to_json(const AnalysisReport& report);

// "x=500, y=3" over `variables`; unnamed variables keep their value in
// `base` (zero when base is empty). Throws std::invalid_argument.
RationalVector parse_valuation(const std::string& text, const std::vector<std::string>& variables,
                               const RationalVector& base = {});

}  // namespace psense::report
