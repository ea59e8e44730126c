#include "psense/lp/solver.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace psense::lp {

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

LpOptions default_lp_options() {
  LpOptions options;
  if (const char* mode = std::getenv("PSENSE_LP_MODE")) {
    std::string m(mode);
    if (m == "float") options.mode = LpMode::Float;
    else if (m != "exact" && !m.empty()) throw LpError("PSENSE_LP_MODE must be 'exact' or 'float', got '" + m + "'");
  }
  return options;
}

namespace {

template <class S>
struct Arith;

template <>
struct Arith<Rational> {
  static bool positive(const Rational& x) { return x > 0; }
  static bool negative(const Rational& x) { return x < 0; }
  static bool zero(const Rational& x) { return x == 0; }
  static Rational from(const Rational& x) { return x; }
  static Rational exact(const Rational& x) { return x; }
  static void clean(Rational&) {}
};

template <>
struct Arith<double> {
  static constexpr double kTolerance = 1e-9;
  static bool positive(double x) { return x > kTolerance; }
  static bool negative(double x) { return x < -kTolerance; }
  static bool zero(double x) { return std::fabs(x) <= kTolerance; }
  static double from(const Rational& x) { return to_double(x); }
  static Rational exact(double x) { return from_double(x); }
  static void clean(double& x) {
    if (std::fabs(x) <= 1e-13) x = 0.0;
  }
};

// Dense tableau simplex over columns x >= 0.
template <class S>
class Tableau {
 public:
  using A = Arith<S>;

  Tableau(std::size_t rows, std::size_t cols) : a_(rows, std::vector<S>(cols + 1, S(0))), basis_(rows, 0), cols_(cols) {}

  std::vector<S>& row(std::size_t i) { return a_[i]; }
  S& rhs(std::size_t i) { return a_[i][cols_]; }
  std::vector<std::size_t>& basis() { return basis_; }
  std::size_t rows() const { return a_.size(); }
  std::size_t cols() const { return cols_; }

  void set_cost(const std::vector<S>& cost) {
    obj_.assign(cols_ + 1, S(0));
    for (std::size_t j = 0; j < cols_; ++j) obj_[j] = cost[j];
    for (std::size_t i = 0; i < a_.size(); ++i) {
      const S& cb = cost[basis_[i]];
      if (A::zero(cb)) continue;
      for (std::size_t j = 0; j <= cols_; ++j)
        if (!A::zero(a_[i][j])) obj_[j] -= cb * a_[i][j];
    }
  }

  // Returns false when unbounded.
  bool optimize(const std::vector<bool>& allowed) {
    while (true) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < cols_; ++j)
        if (allowed[j] && A::negative(obj_[j])) {
          enter = j;
          break;
        }
      if (enter == cols_) return true;
      std::size_t leave = a_.size();
      S best_ratio{};
      for (std::size_t i = 0; i < a_.size(); ++i) {
        if (!A::positive(a_[i][enter])) continue;
        S ratio = a_[i][cols_] / a_[i][enter];
        bool better = leave == a_.size();
        if (!better) {
          S diff = ratio - best_ratio;
          better = A::negative(diff) || (A::zero(diff) && basis_[i] < basis_[leave]);
        }
        if (better) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == a_.size()) return false;
      pivot(leave, enter);
    }
  }

  S objective_value() const { return -obj_[cols_]; }

  void pivot(std::size_t r, std::size_t e) {
    std::vector<S>& pr = a_[r];
    S inv = S(1) / pr[e];
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j <= cols_; ++j) {
      if (A::zero(pr[j])) {
        pr[j] = S(0);
        continue;
      }
      pr[j] *= inv;
      nz.push_back(j);
    }
    pr[e] = S(1);
    auto eliminate = [&](std::vector<S>& target) {
      if (A::zero(target[e])) {
        target[e] = S(0);
        return;
      }
      S f = target[e];
      for (std::size_t j : nz) {
        target[j] -= f * pr[j];
        A::clean(target[j]);
      }
      target[e] = S(0);
    };
    for (std::size_t i = 0; i < a_.size(); ++i)
      if (i != r) eliminate(a_[i]);
    if (!obj_.empty()) eliminate(obj_);
    basis_[r] = e;
  }

  void remove_row(std::size_t i) {
    a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(i));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
  }

  const std::vector<S>& objective_row() const { return obj_; }

 private:
  std::vector<std::vector<S>> a_;
  std::vector<std::size_t> basis_;
  std::vector<S> obj_;
  std::size_t cols_;
};

struct Presolved {
  std::vector<bool> nonnegative;
  std::vector<const Constraint*> rows;
};

Presolved presolve(const LinearConstraintSystem& system) {
  Presolved out;
  out.nonnegative.assign(system.variable_count(), false);
  for (const auto& c : system.constraints()) {
    if (c.relation == Relation::LessEqual && c.terms.size() == 1 && c.bound == 0 && c.terms[0].coeff < 0) {
      out.nonnegative[c.terms[0].var] = true;
      continue;
    }
    out.rows.push_back(&c);
  }
  return out;
}

template <class S>
LpOutcome solve_with(const LinearConstraintSystem& system, const std::optional<LinearObjective>& objective,
                     Sense sense) {
  using A = Arith<S>;
  Presolved pre = presolve(system);
  std::size_t n = system.variable_count();

  // Structural columns: x_j (nonneg) or x_j+ / x_j-.
  std::vector<std::size_t> plus(n), minus(n, SIZE_MAX);
  std::size_t cols = 0;
  for (std::size_t j = 0; j < n; ++j) {
    plus[j] = cols++;
    if (!pre.nonnegative[j]) minus[j] = cols++;
  }
  std::size_t m = pre.rows.size();
  std::vector<std::size_t> slack(m, SIZE_MAX);
  for (std::size_t i = 0; i < m; ++i)
    if (pre.rows[i]->relation == Relation::LessEqual) slack[i] = cols++;
  std::vector<bool> negated(m, false);
  std::vector<std::size_t> artificial(m, SIZE_MAX);
  std::size_t first_artificial = cols;
  for (std::size_t i = 0; i < m; ++i) {
    negated[i] = pre.rows[i]->bound < 0;
    if (pre.rows[i]->relation == Relation::Equal || negated[i]) artificial[i] = cols++;
  }

  Tableau<S> t(m, cols);
  for (std::size_t i = 0; i < m; ++i) {
    const Constraint& c = *pre.rows[i];
    S sign = negated[i] ? S(-1) : S(1);
    auto& row = t.row(i);
    for (const auto& term : c.terms) {
      S v = A::from(term.coeff) * sign;
      row[plus[term.var]] += v;
      if (minus[term.var] != SIZE_MAX) row[minus[term.var]] -= v;
    }
    if (slack[i] != SIZE_MAX) row[slack[i]] = sign;
    t.rhs(i) = A::from(c.bound) * sign;
    if (artificial[i] != SIZE_MAX) {
      row[artificial[i]] = S(1);
      t.basis()[i] = artificial[i];
    } else {
      t.basis()[i] = slack[i];
    }
  }

  LpOutcome outcome;
  std::vector<bool> allowed(cols, true);
  if (first_artificial < cols) {
    std::vector<S> phase1(cols, S(0));
    for (std::size_t j = first_artificial; j < cols; ++j) phase1[j] = S(1);
    t.set_cost(phase1);
    t.optimize(allowed);
    if (A::positive(t.objective_value())) {
      outcome.status = LpStatus::Infeasible;
      return outcome;
    }
    // Drive remaining artificials out of the basis.
    for (std::size_t i = t.rows(); i-- > 0;) {
      if (t.basis()[i] < first_artificial) continue;
      std::size_t enter = SIZE_MAX;
      for (std::size_t j = 0; j < first_artificial; ++j)
        if (!A::zero(t.row(i)[j])) {
          enter = j;
          break;
        }
      if (enter == SIZE_MAX) t.remove_row(i);
      else t.pivot(i, enter);
    }
    for (std::size_t j = first_artificial; j < cols; ++j) allowed[j] = false;
  }

  std::vector<S> cost(cols, S(0));
  if (objective) {
    S flip = sense == Sense::Maximize ? S(-1) : S(1);
    for (const auto& term : compact(objective->terms)) {
      S v = A::from(term.coeff) * flip;
      cost[plus[term.var]] += v;
      if (minus[term.var] != SIZE_MAX) cost[minus[term.var]] -= v;
    }
  }
  t.set_cost(cost);
  bool bounded = t.optimize(allowed);
  if (!bounded) {
    outcome.status = LpStatus::Unbounded;
    return outcome;
  }

  std::vector<S> values(cols, S(0));
  for (std::size_t i = 0; i < t.rows(); ++i) values[t.basis()[i]] = t.rhs(i);
  outcome.status = LpStatus::Optimal;
  outcome.point.assign(n, Rational(0));
  for (std::size_t j = 0; j < n; ++j) {
    S v = values[plus[j]];
    if (minus[j] != SIZE_MAX) v -= values[minus[j]];
    outcome.point[j] = A::exact(v);
  }
  outcome.value = objective ? objective->evaluate(outcome.point) : Rational(0);
  return outcome;
}

std::atomic<unsigned long> dump_counter{0};

void dump(const LinearConstraintSystem& system, const std::optional<LinearObjective>& objective, Sense sense,
          const LpOptions& options, const LpOutcome& outcome) {
  namespace fs = std::filesystem;
  fs::create_directories(options.dump_directory);
  unsigned long id = dump_counter.fetch_add(1);
  std::ostringstream name;
  name << options.dump_tag << "_" << id << ".lp";
  std::ofstream out(fs::path(options.dump_directory) / name.str());
  out << to_lp_text(system, objective, sense, options.dump_tag);
  out << "\\ status: " << to_string(outcome.status) << "\n";
}

}  // namespace

LpOutcome lp_solve(const LinearConstraintSystem& system, const std::optional<LinearObjective>& objective,
                   Sense sense, const LpOptions& options) {
  LpOutcome outcome;
  if (options.mode == LpMode::Float) {
    outcome = solve_with<double>(system, objective, sense);
    outcome.numeric = true;
  } else {
    outcome = solve_with<Rational>(system, objective, sense);
  }
  if (!options.dump_directory.empty()) dump(system, objective, sense, options, outcome);
  return outcome;
}

bool polyhedron_nonempty(const LinearConstraintSystem& polyhedron, const LpOptions& options) {
  return lp_solve(polyhedron, std::nullopt, Sense::Minimize, options).status == LpStatus::Optimal;
}

bool strictly_feasible(const LinearConstraintSystem& polyhedron, const LpOptions& options) {
  if (!polyhedron.has_strict_rows()) return polyhedron_nonempty(polyhedron, options);
  LinearConstraintSystem lifted(polyhedron.variables());
  std::size_t slack = lifted.add_variable("__slack");
  for (const auto& c : polyhedron.constraints()) {
    Constraint copy = c;
    if (c.strict) copy.terms.push_back({slack, Rational(1)});
    copy.strict = false;
    lifted.add(std::move(copy));
  }
  lifted.add_less_equal({{slack, Rational(1)}}, Rational(1));
  LinearObjective objective{{{slack, Rational(1)}}, Rational(0)};
  LpOutcome out = lp_solve(lifted, objective, Sense::Maximize, options);
  return out.status == LpStatus::Optimal && out.value > 0;
}

bool check_inclusion(const LinearConstraintSystem& polyhedron, const RationalVector& c, const Rational& d,
                     const LpOptions& options) {
  if (c.size() != polyhedron.variable_count()) throw LpError("halfspace dimension does not match polyhedron");
  LinearObjective objective;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (c[j] != 0) objective.terms.push_back({j, c[j]});
  LpOutcome out = lp_solve(polyhedron, objective, Sense::Maximize, options);
  if (out.status == LpStatus::Infeasible) throw EmptyPolyhedron("inclusion query on an empty polyhedron");
  if (out.status == LpStatus::Unbounded) return false;
  return out.value <= d;
}

std::string to_lp_text(const LinearConstraintSystem& system, const std::optional<LinearObjective>& objective,
                       Sense sense, const std::string& title) {
  std::ostringstream out;
  const auto& names = system.variables();
  auto terms_text = [&](const std::vector<Term>& terms) {
    std::ostringstream t;
    bool first = true;
    for (const auto& term : terms) {
      bool neg = term.coeff < 0;
      Rational mag = neg ? Rational(-term.coeff) : term.coeff;
      t << (first ? (neg ? "-" : "") : (neg ? " - " : " + ")) << psense::to_string(mag) << " " << names[term.var];
      first = false;
    }
    if (first) t << "0";
    return t.str();
  };
  if (!title.empty()) out << "\\ " << title << "\n";
  out << (sense == Sense::Maximize ? "Maximize" : "Minimize") << "\n obj: ";
  if (objective) {
    out << terms_text(compact(objective->terms));
    if (objective->constant != 0) out << " + " << psense::to_string(objective->constant);
  } else {
    out << "0";
  }
  out << "\nSubject To\n";
  std::size_t idx = 0;
  for (const auto& c : system.constraints()) {
    out << " c" << idx++ << ": " << terms_text(c.terms)
        << (c.relation == Relation::Equal ? " = " : (c.strict ? " < " : " <= ")) << psense::to_string(c.bound) << "\n";
  }
  out << "Bounds\n";
  Presolved pre = presolve(system);
  for (std::size_t j = 0; j < names.size(); ++j)
    out << " " << names[j] << (pre.nonnegative[j] ? " >= 0" : " free") << "\n";
  out << "End\n";
  return out.str();
}

}  // namespace psense::lp
