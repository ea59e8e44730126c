#pragma once

#include "psense/distribution.hpp"
#include "psense/rational.hpp"

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace psense::dsl {

struct SourceSpan {
  int line = 0;
  int column = 0;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Arithmetic expression. Numbers are exact rationals.
struct Expr {
  enum class Kind { Number, Variable, Negate, Add, Sub, Mul, Div };
  Kind kind = Kind::Number;
  Rational value;
  std::string name;
  ExprPtr lhs;
  ExprPtr rhs;
  SourceSpan span;
};

ExprPtr make_number(Rational value, SourceSpan span = {});
ExprPtr make_variable(std::string name, SourceSpan span = {});
ExprPtr make_unary(ExprPtr operand, SourceSpan span = {});
ExprPtr make_binary(Expr::Kind kind, ExprPtr lhs, ExprPtr rhs, SourceSpan span = {});

enum class CompareOp { Le, Lt, Ge, Gt };

std::string to_string(CompareOp op);

struct BoolExpr;
using BoolPtr = std::shared_ptr<const BoolExpr>;

struct BoolExpr {
  enum class Kind { True, False, Compare, And, Or, Not };
  Kind kind = Kind::True;
  CompareOp op = CompareOp::Le;
  ExprPtr lhs;
  ExprPtr rhs;
  BoolPtr left;
  BoolPtr right;
  SourceSpan span;
};

BoolPtr make_bool_constant(bool value, SourceSpan span = {});
BoolPtr make_compare(CompareOp op, ExprPtr lhs, ExprPtr rhs, SourceSpan span = {});
BoolPtr make_logic(BoolExpr::Kind kind, BoolPtr left, BoolPtr right, SourceSpan span = {});

struct Stmt;
using Block = std::vector<Stmt>;

struct SkipStmt {};

// (x1, ..., xk) := (e1, ..., ek); targets are pairwise distinct.
struct AssignStmt {
  std::vector<std::string> targets;
  std::vector<ExprPtr> values;
};

struct ProbStmt {
  ExprPtr probability;
  Rational value;
  Block then_body;
  Block else_body;
};

struct IfStmt {
  BoolPtr condition;
  Block then_body;
  Block else_body;
};

struct WhileStmt {
  BoolPtr guard;
  Block body;
};

struct Stmt {
  std::variant<SkipStmt, AssignStmt, ProbStmt, IfStmt, WhileStmt> node;
  SourceSpan span;
};

struct DistributionDecl {
  std::string name;
  DistributionSpec spec;
  SourceSpan span;
};

struct Program {
  std::string source_name;
  std::vector<DistributionDecl> declarations;
  Block statements;

  const DistributionDecl* find_declaration(const std::string& name) const;
  bool is_sampling_variable(const std::string& name) const { return find_declaration(name) != nullptr; }
};

}  // namespace psense::dsl
