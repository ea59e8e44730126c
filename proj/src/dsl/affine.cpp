#include "psense/dsl/affine.hpp"

namespace psense::dsl {

namespace {

void add_scaled(AffineForm& into, const AffineForm& from, const Rational& factor) {
  for (const auto& [name, coeff] : from.coeffs) {
    Rational& slot = into.coeffs[name];
    slot += coeff * factor;
    if (slot == 0) into.coeffs.erase(name);
  }
  into.constant += from.constant * factor;
}

AffineForm scaled(const AffineForm& form, const Rational& factor) {
  AffineForm out;
  add_scaled(out, form, factor);
  return out;
}

}  // namespace

std::optional<AffineForm> to_affine(const Expr& expr) {
  switch (expr.kind) {
    case Expr::Kind::Number: {
      AffineForm f;
      f.constant = expr.value;
      return f;
    }
    case Expr::Kind::Variable: {
      AffineForm f;
      f.coeffs[expr.name] = 1;
      return f;
    }
    case Expr::Kind::Negate: {
      auto inner = to_affine(*expr.lhs);
      if (!inner) return std::nullopt;
      return scaled(*inner, Rational(-1));
    }
    case Expr::Kind::Add:
    case Expr::Kind::Sub: {
      auto l = to_affine(*expr.lhs);
      auto r = to_affine(*expr.rhs);
      if (!l || !r) return std::nullopt;
      add_scaled(*l, *r, expr.kind == Expr::Kind::Add ? Rational(1) : Rational(-1));
      return l;
    }
    case Expr::Kind::Mul: {
      auto l = to_affine(*expr.lhs);
      auto r = to_affine(*expr.rhs);
      if (!l || !r) return std::nullopt;
      if (l->is_constant()) return scaled(*r, l->constant);
      if (r->is_constant()) return scaled(*l, r->constant);
      return std::nullopt;
    }
    case Expr::Kind::Div: {
      auto l = to_affine(*expr.lhs);
      auto r = to_affine(*expr.rhs);
      if (!l || !r || !r->is_constant() || r->constant == 0) return std::nullopt;
      return scaled(*l, Rational(1) / r->constant);
    }
  }
  return std::nullopt;
}

std::optional<Rational> constant_value(const Expr& expr) {
  auto form = to_affine(expr);
  if (!form || !form->is_constant()) return std::nullopt;
  return form->constant;
}

void collect_variables(const Expr& expr, std::set<std::string>& out) {
  if (expr.kind == Expr::Kind::Variable) out.insert(expr.name);
  if (expr.lhs) collect_variables(*expr.lhs, out);
  if (expr.rhs) collect_variables(*expr.rhs, out);
}

void collect_variables(const BoolExpr& expr, std::set<std::string>& out) {
  if (expr.lhs) collect_variables(*expr.lhs, out);
  if (expr.rhs) collect_variables(*expr.rhs, out);
  if (expr.left) collect_variables(*expr.left, out);
  if (expr.right) collect_variables(*expr.right, out);
}

}  // namespace psense::dsl
