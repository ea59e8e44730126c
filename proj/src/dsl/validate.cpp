#include "psense/dsl/validate.hpp"

#include "psense/dsl/affine.hpp"
#include "psense/dsl/printer.hpp"

#include <algorithm>

namespace psense::dsl {

std::string render(const Diagnostic& diagnostic, const std::string& source_name) {
  return source_name + ":" + std::to_string(diagnostic.span.line) + ":" + std::to_string(diagnostic.span.column) +
         ": " + (diagnostic.severity == Severity::Error ? "error" : "warning") + ": " + diagnostic.message + " [" +
         diagnostic.rule + "]";
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

namespace {

class Validator {
 public:
  explicit Validator(const Program& program) : program_(program) {}

  std::vector<Diagnostic> run() {
    bool only_loops = true;
    for (const auto& stmt : program_.statements) {
      if (const auto* loop = std::get_if<WhileStmt>(&stmt.node)) {
        check_guard(*loop->guard, stmt.span);
        check_block(loop->body);
      } else {
        only_loops = false;
        check_outside(stmt);
      }
    }
    if (!only_loops) {
      warn(program_.statements.front().span, "top-level-shape",
           "top level is not a sequence of while loops; only loops are analysed");
    }
    return std::move(diagnostics_);
  }

 private:
  void error(SourceSpan span, std::string rule, std::string message) {
    diagnostics_.push_back({Severity::Error, span, std::move(rule), std::move(message)});
  }

  void warn(SourceSpan span, std::string rule, std::string message) {
    diagnostics_.push_back({Severity::Warning, span, std::move(rule), std::move(message)});
  }

  void check_guard(const BoolExpr& guard, SourceSpan span) {
    check_condition(guard, span, "loop guard");
  }

  // Comparisons must be affine over program variables only.
  void check_condition(const BoolExpr& cond, SourceSpan span, const char* what) {
    if (cond.kind == BoolExpr::Kind::Compare) {
      for (const auto& side : {cond.lhs, cond.rhs}) {
        std::set<std::string> vars;
        collect_variables(*side, vars);
        for (const auto& v : vars)
          if (program_.is_sampling_variable(v))
            error(side->span, "sampling-in-condition",
                  std::string(what) + " reads sampling variable '" + v + "'");
        if (!to_affine(*side)) error(side->span, "non-affine-guard", std::string(what) + " is not affine");
      }
      return;
    }
    if (cond.left) check_condition(*cond.left, span, what);
    if (cond.right) check_condition(*cond.right, span, what);
  }

  void check_block(const Block& block) {
    for (const auto& stmt : block) check_body_stmt(stmt);
  }

  void check_body_stmt(const Stmt& stmt) {
    if (const auto* assign = std::get_if<AssignStmt>(&stmt.node)) {
      for (const auto& value : assign->values)
        if (!to_affine(*value))
          error(value->span, "non-affine-update", "update expression '" + pretty_expr(*value) + "' is not affine");
    } else if (const auto* prob = std::get_if<ProbStmt>(&stmt.node)) {
      check_block(prob->then_body);
      check_block(prob->else_body);
    } else if (const auto* branch = std::get_if<IfStmt>(&stmt.node)) {
      std::set<std::string> vars;
      collect_variables(*branch->condition, vars);
      bool state_dependent = std::any_of(vars.begin(), vars.end(),
                                         [&](const std::string& v) { return !program_.is_sampling_variable(v); });
      if (state_dependent)
        error(stmt.span, "state-conditional-in-loop",
              "conditional on program state inside a loop body; only probabilistic branching is supported");
      else
        check_condition(*branch->condition, stmt.span, "condition");
      check_block(branch->then_body);
      check_block(branch->else_body);
    } else if (std::holds_alternative<WhileStmt>(stmt.node)) {
      error(stmt.span, "nested-loop", "nested while loop inside a loop body");
    }
  }

  // Statements outside loops are not analysed; affinity is still reported.
  void check_outside(const Stmt& stmt) {
    if (const auto* assign = std::get_if<AssignStmt>(&stmt.node)) {
      for (const auto& value : assign->values)
        if (!to_affine(*value))
          error(value->span, "non-affine-update", "update expression '" + pretty_expr(*value) + "' is not affine");
    }
  }

  static std::string pretty_expr(const Expr& e) { return pretty_print(e); }

  const Program& program_;
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace

std::vector<Diagnostic> validate(const Program& program) { return Validator(program).run(); }

}  // namespace psense::dsl
