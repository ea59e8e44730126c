#pragma once

#include "psense/dsl/ast.hpp"

#include <string>

namespace psense::dsl {

// Canonical source text; parse(pretty_print(p)) reproduces p up to spans.
std::string pretty_print(const Program& program);
std::string pretty_print(const Expr& expr);
std::string pretty_print(const BoolExpr& expr);

// Exact decimal text for values with a power-of-ten-compatible denominator,
// otherwise "p / q".
std::string format_number(const Rational& value);

}  // namespace psense::dsl
