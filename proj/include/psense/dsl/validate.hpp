#pragma once

#include "psense/dsl/ast.hpp"

#include <string>
#include <vector>

namespace psense::dsl {

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  SourceSpan span;
  std::string rule;
  std::string message;
};

// "file:line:col: severity: message [rule]"
std::string render(const Diagnostic& diagnostic, const std::string& source_name);

std::vector<Diagnostic> validate(const Program& program);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace psense::dsl
