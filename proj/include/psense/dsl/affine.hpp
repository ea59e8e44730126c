#pragma once

#include "psense/dsl/ast.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>

namespace psense::dsl {

// sum(coeffs[name] * name) + constant, keyed by variable name.
struct AffineForm {
  std::map<std::string, Rational> coeffs;
  Rational constant;

  bool is_constant() const { return coeffs.empty(); }
};

// Returns std::nullopt when the expression is not affine in its variables
// (product of two non-constant terms, or division by a non-constant).
std::optional<AffineForm> to_affine(const Expr& expr);

std::optional<Rational> constant_value(const Expr& expr);

void collect_variables(const Expr& expr, std::set<std::string>& out);
void collect_variables(const BoolExpr& expr, std::set<std::string>& out);

}  // namespace psense::dsl
