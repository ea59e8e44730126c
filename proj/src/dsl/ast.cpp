#include "psense/dsl/ast.hpp"

namespace psense::dsl {

ExprPtr make_number(Rational value, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Number;
  e->value = std::move(value);
  e->span = span;
  return e;
}

ExprPtr make_variable(std::string name, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Variable;
  e->name = std::move(name);
  e->span = span;
  return e;
}

ExprPtr make_unary(ExprPtr operand, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Negate;
  e->lhs = std::move(operand);
  e->span = span;
  return e;
}

ExprPtr make_binary(Expr::Kind kind, ExprPtr lhs, ExprPtr rhs, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  e->span = span;
  return e;
}

std::string to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Le: return "<=";
    case CompareOp::Lt: return "<";
    case CompareOp::Ge: return ">=";
    case CompareOp::Gt: return ">";
  }
  return "?";
}

BoolPtr make_bool_constant(bool value, SourceSpan span) {
  auto b = std::make_shared<BoolExpr>();
  b->kind = value ? BoolExpr::Kind::True : BoolExpr::Kind::False;
  b->span = span;
  return b;
}

BoolPtr make_compare(CompareOp op, ExprPtr lhs, ExprPtr rhs, SourceSpan span) {
  auto b = std::make_shared<BoolExpr>();
  b->kind = BoolExpr::Kind::Compare;
  b->op = op;
  b->lhs = std::move(lhs);
  b->rhs = std::move(rhs);
  b->span = span;
  return b;
}

BoolPtr make_logic(BoolExpr::Kind kind, BoolPtr left, BoolPtr right, SourceSpan span) {
  auto b = std::make_shared<BoolExpr>();
  b->kind = kind;
  b->left = std::move(left);
  b->right = std::move(right);
  b->span = span;
  return b;
}

const DistributionDecl* Program::find_declaration(const std::string& name) const {
  for (const auto& decl : declarations)
    if (decl.name == name) return &decl;
  return nullptr;
}

}  // namespace psense::dsl
