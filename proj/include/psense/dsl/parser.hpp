#pragma once

#include "psense/dsl/ast.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace psense::dsl {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& source, SourceSpan span, const std::string& message);
  SourceSpan span() const { return span_; }
  const std::string& detail() const { return detail_; }

 private:
  SourceSpan span_;
  std::string detail_;
};

class DuplicateDeclaration : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

Program parse(std::string_view text, const std::string& source_name = "<input>");

// Parses a standalone arithmetic expression such as "-5*x + 5000".
ExprPtr parse_expression(std::string_view text);

}  // namespace psense::dsl
