#include "psense/model/loop_model.hpp"

#include "psense/dsl/affine.hpp"
#include "psense/dsl/printer.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace psense::model {

RationalVector AffineUpdate::apply(const RationalVector& v, const RationalVector& r) const {
  RationalVector out = offset;
  for (std::size_t z = 0; z < out.size(); ++z) {
    for (std::size_t k = 0; k < v.size(); ++k)
      if (B[z][k] != 0) out[z] += B[z][k] * v[k];
    for (std::size_t k = 0; k < r.size(); ++k)
      if (C[z][k] != 0) out[z] += C[z][k] * r[k];
  }
  return out;
}

std::size_t LoopModel::variable_index(const std::string& name) const {
  auto it = std::find(program_variables.begin(), program_variables.end(), name);
  if (it == program_variables.end()) throw ExtractionError("unknown program variable '" + name + "'");
  return static_cast<std::size_t>(it - program_variables.begin());
}

namespace {

void note(std::vector<std::string>& order, std::set<std::string>& seen, const dsl::Program& program,
          const std::string& name) {
  if (program.is_sampling_variable(name)) return;
  if (seen.insert(name).second) order.push_back(name);
}

void visit_expr(const dsl::Expr& e, std::vector<std::string>& order, std::set<std::string>& seen,
                const dsl::Program& program) {
  if (e.kind == dsl::Expr::Kind::Variable) note(order, seen, program, e.name);
  if (e.lhs) visit_expr(*e.lhs, order, seen, program);
  if (e.rhs) visit_expr(*e.rhs, order, seen, program);
}

void visit_bool(const dsl::BoolExpr& b, std::vector<std::string>& order, std::set<std::string>& seen,
                const dsl::Program& program) {
  if (b.lhs) visit_expr(*b.lhs, order, seen, program);
  if (b.rhs) visit_expr(*b.rhs, order, seen, program);
  if (b.left) visit_bool(*b.left, order, seen, program);
  if (b.right) visit_bool(*b.right, order, seen, program);
}

void visit_block(const dsl::Block& block, std::vector<std::string>& order, std::set<std::string>& seen,
                 const dsl::Program& program) {
  for (const auto& stmt : block) {
    if (const auto* a = std::get_if<dsl::AssignStmt>(&stmt.node)) {
      for (const auto& t : a->targets) note(order, seen, program, t);
      for (const auto& v : a->values) visit_expr(*v, order, seen, program);
    } else if (const auto* p = std::get_if<dsl::ProbStmt>(&stmt.node)) {
      visit_block(p->then_body, order, seen, program);
      visit_block(p->else_body, order, seen, program);
    } else if (const auto* i = std::get_if<dsl::IfStmt>(&stmt.node)) {
      visit_bool(*i->condition, order, seen, program);
      visit_block(i->then_body, order, seen, program);
      visit_block(i->else_body, order, seen, program);
    } else if (const auto* w = std::get_if<dsl::WhileStmt>(&stmt.node)) {
      visit_bool(*w->guard, order, seen, program);
      visit_block(w->body, order, seen, program);
    }
  }
}

// Affine value over (loop-head variables, sampling columns).
struct Symbolic {
  RationalVector state;
  RationalVector sample;
  Rational constant;

  bool is_constant() const {
    auto zero = [](const Rational& c) { return c == 0; };
    return std::all_of(state.begin(), state.end(), zero) && std::all_of(sample.begin(), sample.end(), zero);
  }

  void scale(const Rational& f) {
    for (auto& c : state) c *= f;
    for (auto& c : sample) c *= f;
    constant *= f;
  }

  void add(const Symbolic& o, const Rational& f) {
    for (std::size_t i = 0; i < state.size(); ++i) state[i] += o.state[i] * f;
    for (std::size_t i = 0; i < sample.size(); ++i) sample[i] += o.sample[i] * f;
    constant += o.constant * f;
  }
};

struct PathState {
  std::vector<Symbolic> values;
  Rational probability = 1;
  std::string path;
};

class Extractor {
 public:
  Extractor(const dsl::Program& program, const dsl::WhileStmt& loop, std::vector<std::string> variables)
      : program_(program), loop_(loop), variables_(std::move(variables)) {}

  LoopModel run(std::size_t loop_index, dsl::SourceSpan span) {
    number_columns(loop_.body);
    LoopModel model;
    model.loop_index = loop_index;
    model.span = span;
    model.program_variables = variables_;
    model.columns = columns_;
    model.guard = guard_to_dnf(*loop_.guard, variables_);
    model.negated_guard = negate_guard(model.guard);
    model.guard_text = dsl::pretty_print(*loop_.guard);

    PathState start;
    for (std::size_t z = 0; z < variables_.size(); ++z) {
      Symbolic s = zero();
      s.state[z] = 1;
      start.values.push_back(std::move(s));
    }
    std::vector<PathState> paths = execute(loop_.body, {std::move(start)});
    for (auto& p : paths) {
      Resolution res;
      res.id = model.resolutions.size();
      res.probability = p.probability;
      res.path = p.path;
      std::size_t n = variables_.size();
      std::size_t m = columns_.size();
      res.update.B.assign(n, RationalVector(n, Rational(0)));
      res.update.C.assign(n, RationalVector(m, Rational(0)));
      res.update.offset.assign(n, Rational(0));
      std::set<std::size_t> used;
      for (std::size_t z = 0; z < n; ++z) {
        res.update.B[z] = p.values[z].state;
        res.update.C[z] = p.values[z].sample;
        res.update.offset[z] = p.values[z].constant;
        for (std::size_t k = 0; k < m; ++k)
          if (p.values[z].sample[k] != 0) used.insert(k);
      }
      res.columns_used.assign(used.begin(), used.end());
      model.resolutions.push_back(std::move(res));
    }
    return model;
  }

 private:
  Symbolic zero() const {
    Symbolic s;
    s.state.assign(variables_.size(), Rational(0));
    s.sample.assign(columns_.size(), Rational(0));
    return s;
  }

  void number_expr(const dsl::Expr& e) {
    if (e.kind == dsl::Expr::Kind::Variable) {
      if (const auto* decl = program_.find_declaration(e.name)) {
        column_of_[&e] = columns_.size();
        columns_.push_back({decl->name, decl->spec, e.span});
      }
    }
    if (e.lhs) number_expr(*e.lhs);
    if (e.rhs) number_expr(*e.rhs);
  }

  void number_columns(const dsl::Block& block) {
    for (const auto& stmt : block) {
      if (const auto* a = std::get_if<dsl::AssignStmt>(&stmt.node)) {
        for (const auto& v : a->values) number_expr(*v);
      } else if (const auto* p = std::get_if<dsl::ProbStmt>(&stmt.node)) {
        number_columns(p->then_body);
        number_columns(p->else_body);
      } else if (const auto* i = std::get_if<dsl::IfStmt>(&stmt.node)) {
        number_columns(i->then_body);
        number_columns(i->else_body);
      }
    }
  }

  Symbolic eval(const dsl::Expr& e, const std::vector<Symbolic>& values) const {
    using Kind = dsl::Expr::Kind;
    switch (e.kind) {
      case Kind::Number: {
        Symbolic s = zero();
        s.constant = e.value;
        return s;
      }
      case Kind::Variable: {
        auto col = column_of_.find(&e);
        if (col != column_of_.end()) {
          Symbolic s = zero();
          s.sample[col->second] = 1;
          return s;
        }
        auto it = std::find(variables_.begin(), variables_.end(), e.name);
        return values[static_cast<std::size_t>(it - variables_.begin())];
      }
      case Kind::Negate: {
        Symbolic s = eval(*e.lhs, values);
        s.scale(Rational(-1));
        return s;
      }
      case Kind::Add:
      case Kind::Sub: {
        Symbolic l = eval(*e.lhs, values);
        l.add(eval(*e.rhs, values), e.kind == Kind::Add ? Rational(1) : Rational(-1));
        return l;
      }
      case Kind::Mul: {
        Symbolic l = eval(*e.lhs, values);
        Symbolic r = eval(*e.rhs, values);
        if (l.is_constant()) {
          r.scale(l.constant);
          return r;
        }
        if (r.is_constant()) {
          l.scale(r.constant);
          return l;
        }
        throw ExtractionError(where(e) + "product '" + dsl::pretty_print(e) + "' is not affine");
      }
      case Kind::Div: {
        Symbolic l = eval(*e.lhs, values);
        Symbolic r = eval(*e.rhs, values);
        if (!r.is_constant() || r.constant == 0)
          throw ExtractionError(where(e) + "division '" + dsl::pretty_print(e) + "' is not affine");
        l.scale(Rational(1) / r.constant);
        return l;
      }
    }
    return zero();
  }

  std::string where(const dsl::Expr& e) const {
    return program_.source_name + ":" + std::to_string(e.span.line) + ":" + std::to_string(e.span.column) + ": ";
  }

  bool eval_condition(const dsl::BoolExpr& b) const {
    using Kind = dsl::BoolExpr::Kind;
    switch (b.kind) {
      case Kind::True: return true;
      case Kind::False: return false;
      case Kind::Not: return !eval_condition(*b.left);
      case Kind::And: return eval_condition(*b.left) && eval_condition(*b.right);
      case Kind::Or: return eval_condition(*b.left) || eval_condition(*b.right);
      case Kind::Compare: {
        auto l = dsl::constant_value(*b.lhs);
        auto r = dsl::constant_value(*b.rhs);
        if (!l || !r)
          throw ExtractionError(program_.source_name + ":" + std::to_string(b.span.line) + ":" +
                                std::to_string(b.span.column) + ": conditional on program state inside loop body");
        switch (b.op) {
          case dsl::CompareOp::Le: return *l <= *r;
          case dsl::CompareOp::Lt: return *l < *r;
          case dsl::CompareOp::Ge: return *l >= *r;
          case dsl::CompareOp::Gt: return *l > *r;
        }
      }
    }
    return false;
  }

  std::vector<PathState> execute(const dsl::Block& block, std::vector<PathState> paths) const {
    for (const auto& stmt : block) paths = execute(stmt, std::move(paths));
    return paths;
  }

  std::vector<PathState> execute(const dsl::Stmt& stmt, std::vector<PathState> paths) const {
    if (std::holds_alternative<dsl::SkipStmt>(stmt.node)) return paths;
    if (const auto* a = std::get_if<dsl::AssignStmt>(&stmt.node)) {
      for (auto& p : paths) {
        std::vector<Symbolic> next;
        for (const auto& v : a->values) next.push_back(eval(*v, p.values));
        for (std::size_t i = 0; i < a->targets.size(); ++i) {
          auto it = std::find(variables_.begin(), variables_.end(), a->targets[i]);
          p.values[static_cast<std::size_t>(it - variables_.begin())] = std::move(next[i]);
        }
      }
      return paths;
    }
    if (const auto* pr = std::get_if<dsl::ProbStmt>(&stmt.node)) {
      std::vector<PathState> then_paths;
      std::vector<PathState> else_paths;
      for (const auto& p : paths) {
        if (pr->value > 0) {
          PathState t = p;
          t.probability *= pr->value;
          t.path += 'L';
          then_paths.push_back(std::move(t));
        }
        if (pr->value < 1) {
          PathState e = p;
          e.probability *= Rational(1) - pr->value;
          e.path += 'R';
          else_paths.push_back(std::move(e));
        }
      }
      if (then_paths.size() + else_paths.size() > kMaxResolutions)
        throw ResolutionBlowup("loop body has more than " + std::to_string(kMaxResolutions) + " resolutions");
      then_paths = execute(pr->then_body, std::move(then_paths));
      else_paths = execute(pr->else_body, std::move(else_paths));
      then_paths.insert(then_paths.end(), std::make_move_iterator(else_paths.begin()),
                        std::make_move_iterator(else_paths.end()));
      if (then_paths.size() > kMaxResolutions)
        throw ResolutionBlowup("loop body has more than " + std::to_string(kMaxResolutions) + " resolutions");
      return then_paths;
    }
    if (const auto* branch = std::get_if<dsl::IfStmt>(&stmt.node)) {
      return execute(eval_condition(*branch->condition) ? branch->then_body : branch->else_body, std::move(paths));
    }
    throw ExtractionError(program_.source_name + ":" + std::to_string(stmt.span.line) + ":" +
                          std::to_string(stmt.span.column) + ": nested while loop inside loop body");
  }

  const dsl::Program& program_;
  const dsl::WhileStmt& loop_;
  std::vector<std::string> variables_;
  std::vector<SamplingColumn> columns_;
  std::map<const dsl::Expr*, std::size_t> column_of_;
};

nlohmann::json rational_json(const Rational& r) { return to_string(r); }

nlohmann::json matrix_json(const RationalMatrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : m) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& c : row) r.push_back(rational_json(c));
    out.push_back(r);
  }
  return out;
}

nlohmann::json guard_json(const GuardDnf& g) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& poly : g.disjuncts) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : poly.rows) {
      nlohmann::json coeffs = nlohmann::json::array();
      for (const auto& c : row.coeffs) coeffs.push_back(rational_json(c));
      rows.push_back({{"coeffs", coeffs}, {"bound", rational_json(row.bound)}, {"strict", row.strict}});
    }
    out.push_back(rows);
  }
  return out;
}

}  // namespace

std::vector<std::string> collect_program_variables(const dsl::Program& program) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  visit_block(program.statements, order, seen, program);
  return order;
}

std::vector<LoopModel> extract_models(const dsl::Program& program) {
  std::vector<std::string> variables = collect_program_variables(program);
  std::vector<LoopModel> models;
  for (const auto& stmt : program.statements) {
    if (const auto* loop = std::get_if<dsl::WhileStmt>(&stmt.node)) {
      Extractor extractor(program, *loop, variables);
      models.push_back(extractor.run(models.size(), stmt.span));
    }
  }
  return models;
}

nlohmann::json to_json(const LoopModel& model) {
  nlohmann::json columns = nlohmann::json::array();
  for (const auto& c : model.columns) {
    nlohmann::json d = {{"kind", to_string(c.distribution.kind)},
                        {"support", {rational_json(c.distribution.support_lo), rational_json(c.distribution.support_hi)}},
                        {"mean", rational_json(c.distribution.mean)}};
    if (c.distribution.density_bound) d["density_bound"] = rational_json(*c.distribution.density_bound);
    columns.push_back({{"variable", c.variable}, {"line", c.span.line}, {"column", c.span.column}, {"distribution", d}});
  }
  nlohmann::json resolutions = nlohmann::json::array();
  for (const auto& r : model.resolutions) {
    nlohmann::json offset = nlohmann::json::array();
    for (const auto& c : r.update.offset) offset.push_back(rational_json(c));
    resolutions.push_back({{"id", r.id},
                           {"probability", rational_json(r.probability)},
                           {"path", r.path},
                           {"B", matrix_json(r.update.B)},
                           {"C", matrix_json(r.update.C)},
                           {"offset", offset},
                           {"columns_used", r.columns_used}});
  }
  return {{"loop_index", model.loop_index},
          {"guard_text", model.guard_text},
          {"program_variables", model.program_variables},
          {"columns", columns},
          {"guard", guard_json(model.guard)},
          {"negated_guard", guard_json(model.negated_guard)},
          {"resolutions", resolutions}};
}

}  // namespace psense::model
