#include "psense/dsl/printer.hpp"

#include <sstream>

namespace psense::dsl {

namespace {

std::optional<std::string> exact_decimal(const Rational& value) {
  Integer num = boost::multiprecision::numerator(value);
  Integer den = boost::multiprecision::denominator(value);
  unsigned twos = 0;
  unsigned fives = 0;
  Integer rest = den;
  while (rest % 2 == 0) {
    rest /= 2;
    ++twos;
  }
  while (rest % 5 == 0) {
    rest /= 5;
    ++fives;
  }
  if (rest != 1) return std::nullopt;
  unsigned places = std::max(twos, fives);
  Integer scale = 1;
  for (unsigned i = 0; i < places; ++i) scale *= 10;
  Integer scaled = num * (scale / den);
  bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string digits = scaled.str();
  if (places > 0) {
    if (digits.size() <= places) digits.insert(0, places + 1 - digits.size(), '0');
    digits.insert(digits.size() - places, ".");
  }
  return negative ? "-" + digits : digits;
}

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 2;
    case Expr::Kind::Negate: return 3;
    case Expr::Kind::Number:
      if (!exact_decimal(e.value)) return 2;
      return e.value < 0 ? 3 : 4;
    case Expr::Kind::Variable: return 4;
  }
  return 4;
}

void print_expr(std::ostream& out, const Expr& e, int required) {
  int own = precedence(e);
  bool parens = own < required;
  if (parens) out << '(';
  switch (e.kind) {
    case Expr::Kind::Number: out << format_number(e.value); break;
    case Expr::Kind::Variable: out << e.name; break;
    case Expr::Kind::Negate:
      out << '-';
      print_expr(out, *e.lhs, 3);
      break;
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
    case Expr::Kind::Mul:
    case Expr::Kind::Div: {
      const char* op = e.kind == Expr::Kind::Add ? " + " : e.kind == Expr::Kind::Sub ? " - " : e.kind == Expr::Kind::Mul ? " * " : " / ";
      print_expr(out, *e.lhs, own);
      out << op;
      print_expr(out, *e.rhs, own + 1);
      break;
    }
  }
  if (parens) out << ')';
}

int bool_precedence(const BoolExpr& b) {
  switch (b.kind) {
    case BoolExpr::Kind::Or: return 1;
    case BoolExpr::Kind::And: return 2;
    case BoolExpr::Kind::Not: return 3;
    default: return 4;
  }
}

void print_bool(std::ostream& out, const BoolExpr& b, int required) {
  int own = bool_precedence(b);
  bool parens = own < required;
  if (parens) out << '(';
  switch (b.kind) {
    case BoolExpr::Kind::True: out << "true"; break;
    case BoolExpr::Kind::False: out << "false"; break;
    case BoolExpr::Kind::Compare:
      print_expr(out, *b.lhs, 0);
      out << ' ' << to_string(b.op) << ' ';
      print_expr(out, *b.rhs, 0);
      break;
    case BoolExpr::Kind::Not:
      out << "not ";
      print_bool(out, *b.left, 3);
      break;
    case BoolExpr::Kind::And:
    case BoolExpr::Kind::Or:
      print_bool(out, *b.left, own);
      out << (b.kind == BoolExpr::Kind::And ? " and " : " or ");
      print_bool(out, *b.right, own + 1);
      break;
  }
  if (parens) out << ')';
}

void print_block(std::ostream& out, const Block& block, int indent);

void print_stmt(std::ostream& out, const Stmt& stmt, int indent) {
  std::string pad(static_cast<std::size_t>(indent), ' ');
  out << pad;
  if (std::holds_alternative<SkipStmt>(stmt.node)) {
    out << "skip";
  } else if (const auto* assign = std::get_if<AssignStmt>(&stmt.node)) {
    if (assign->targets.size() == 1) {
      out << assign->targets[0] << " := ";
      print_expr(out, *assign->values[0], 0);
    } else {
      out << '(';
      for (std::size_t i = 0; i < assign->targets.size(); ++i) out << (i ? ", " : "") << assign->targets[i];
      out << ") := (";
      for (std::size_t i = 0; i < assign->values.size(); ++i) {
        if (i) out << ", ";
        print_expr(out, *assign->values[i], 0);
      }
      out << ')';
    }
  } else if (const auto* prob = std::get_if<ProbStmt>(&stmt.node)) {
    out << "if prob(";
    print_expr(out, *prob->probability, 0);
    out << ") then\n";
    print_block(out, prob->then_body, indent + 2);
    out << '\n' << pad << "else\n";
    print_block(out, prob->else_body, indent + 2);
    out << '\n' << pad << "fi";
  } else if (const auto* branch = std::get_if<IfStmt>(&stmt.node)) {
    out << "if ";
    print_bool(out, *branch->condition, 0);
    out << " then\n";
    print_block(out, branch->then_body, indent + 2);
    out << '\n' << pad << "else\n";
    print_block(out, branch->else_body, indent + 2);
    out << '\n' << pad << "fi";
  } else if (const auto* loop = std::get_if<WhileStmt>(&stmt.node)) {
    out << "while ";
    print_bool(out, *loop->guard, 0);
    out << " do\n";
    print_block(out, loop->body, indent + 2);
    out << '\n' << pad << "od";
  }
}

void print_block(std::ostream& out, const Block& block, int indent) {
  for (std::size_t i = 0; i < block.size(); ++i) {
    if (i > 0) out << ";\n";
    print_stmt(out, block[i], indent);
  }
}

void print_distribution(std::ostream& out, const DistributionSpec& spec) {
  switch (spec.kind) {
    case DistributionKind::Uniform:
      out << "unif(" << format_number(spec.support_lo) << ", " << format_number(spec.support_hi) << ')';
      break;
    case DistributionKind::Bernoulli: out << "bern(" << format_number(spec.mean) << ')'; break;
    case DistributionKind::Dirac: out << "dirac(" << format_number(spec.mean) << ')'; break;
    case DistributionKind::Discrete:
      out << "discrete{";
      for (std::size_t i = 0; i < spec.atoms.size(); ++i) {
        if (i) out << ", ";
        out << format_number(spec.atoms[i].first) << ": " << format_number(spec.atoms[i].second);
      }
      out << '}';
      break;
  }
}

}  // namespace

std::string format_number(const Rational& value) {
  if (auto text = exact_decimal(value)) return *text;
  Integer num = boost::multiprecision::numerator(value);
  Integer den = boost::multiprecision::denominator(value);
  return num.str() + " / " + den.str();
}

std::string pretty_print(const Expr& expr) {
  std::ostringstream out;
  print_expr(out, expr, 0);
  return out.str();
}

std::string pretty_print(const BoolExpr& expr) {
  std::ostringstream out;
  print_bool(out, expr, 0);
  return out.str();
}

std::string pretty_print(const Program& program) {
  std::ostringstream out;
  for (const auto& decl : program.declarations) {
    out << decl.name << " ~ ";
    print_distribution(out, decl.spec);
    out << '\n';
  }
  print_block(out, program.statements, 0);
  out << '\n';
  return out.str();
}

}  // namespace psense::dsl
