#pragma once

#include "psense/rational.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace psense::lp {

struct Term {
  std::size_t var = 0;
  Rational coeff;
};

enum class Relation { LessEqual, Equal };

// sum(terms) <= bound (or = bound). `strict` marks a row that stands for a
// strict inequality; solvers treat it as its closure.
struct Constraint {
  std::vector<Term> terms;
  Relation relation = Relation::LessEqual;
  Rational bound;
  bool strict = false;
};

class LinearConstraintSystem {
 public:
  LinearConstraintSystem() = default;
  explicit LinearConstraintSystem(std::vector<std::string> variables) : variables_(std::move(variables)) {}

  std::size_t add_variable(std::string name);
  std::size_t variable_count() const { return variables_.size(); }
  const std::vector<std::string>& variables() const { return variables_; }

  void add(Constraint constraint);
  void add_less_equal(std::vector<Term> terms, Rational bound, bool strict = false);
  void add_equal(std::vector<Term> terms, Rational bound);
  // Dense row helper; zero coefficients are dropped.
  void add_dense(const RationalVector& coeffs, Rational bound, bool strict = false);

  const std::vector<Constraint>& constraints() const { return constraints_; }
  bool has_strict_rows() const;

 private:
  std::vector<std::string> variables_;
  std::vector<Constraint> constraints_;
};

// Affine function of the variables: sum(terms) + constant.
struct LinearObjective {
  std::vector<Term> terms;
  Rational constant;

  Rational evaluate(const RationalVector& point) const;
};

std::vector<Term> compact(std::vector<Term> terms);

class LpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyPolyhedron : public LpError {
 public:
  using LpError::LpError;
};

}  // namespace psense::lp
