#pragma once

#include "psense/dsl/ast.hpp"
#include "psense/rational.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace psense::model {

// coeffs . v <= bound, or < bound when strict.
struct LinearRow {
  RationalVector coeffs;
  Rational bound;
  bool strict = false;

  bool satisfied_by(const RationalVector& point) const;
  bool operator==(const LinearRow& other) const = default;
};

// Conjunction of rows.
struct Polyhedron {
  std::vector<LinearRow> rows;

  bool contains(const RationalVector& point) const;
  bool operator==(const Polyhedron& other) const = default;
};

// Disjunction of polyhedra. Strict rows keep their flag; solvers use the
// closure, which over-approximates the set.
struct GuardDnf {
  std::size_t dimension = 0;
  std::vector<Polyhedron> disjuncts;

  bool is_false() const { return disjuncts.empty(); }
  bool contains(const RationalVector& point) const;
};

inline constexpr std::size_t kMaxDisjuncts = 64;

class DnfBlowup : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

GuardDnf guard_to_dnf(const dsl::BoolExpr& guard, const std::vector<std::string>& variables);

GuardDnf negate_guard(const GuardDnf& guard);

LinearRow negate_row(const LinearRow& row);

std::string describe_row(const LinearRow& row, const std::vector<std::string>& variables);
std::string describe_guard(const GuardDnf& guard, const std::vector<std::string>& variables);

}  // namespace psense::model
