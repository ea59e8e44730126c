#include "psense/model/guard.hpp"

#include "psense/dsl/affine.hpp"
#include "psense/dsl/printer.hpp"

#include <algorithm>

namespace psense::model {

bool LinearRow::satisfied_by(const RationalVector& point) const {
  Rational lhs = 0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) lhs += coeffs[i] * point[i];
  return strict ? lhs < bound : lhs <= bound;
}

bool Polyhedron::contains(const RationalVector& point) const {
  return std::all_of(rows.begin(), rows.end(), [&](const LinearRow& r) { return r.satisfied_by(point); });
}

bool GuardDnf::contains(const RationalVector& point) const {
  return std::any_of(disjuncts.begin(), disjuncts.end(), [&](const Polyhedron& p) { return p.contains(point); });
}

LinearRow negate_row(const LinearRow& row) {
  LinearRow out;
  out.coeffs.reserve(row.coeffs.size());
  for (const auto& c : row.coeffs) out.coeffs.push_back(-c);
  out.bound = -row.bound;
  out.strict = !row.strict;
  return out;
}

namespace {

using Dnf = std::vector<Polyhedron>;

enum class Constant { True, False, NotConstant };

Constant constant_row(const LinearRow& row) {
  if (std::any_of(row.coeffs.begin(), row.coeffs.end(), [](const Rational& c) { return c != 0; }))
    return Constant::NotConstant;
  bool holds = row.strict ? Rational(0) < row.bound : Rational(0) <= row.bound;
  return holds ? Constant::True : Constant::False;
}

// Drops trivially true rows and duplicates; returns false if a row is
// trivially false.
bool simplify(Polyhedron& poly) {
  std::vector<LinearRow> kept;
  for (auto& row : poly.rows) {
    Constant c = constant_row(row);
    if (c == Constant::False) return false;
    if (c == Constant::True) continue;
    if (std::find(kept.begin(), kept.end(), row) == kept.end()) kept.push_back(std::move(row));
  }
  poly.rows = std::move(kept);
  return true;
}

Dnf normalize(Dnf dnf) {
  Dnf out;
  for (auto& poly : dnf) {
    if (!simplify(poly)) continue;
    if (std::find(out.begin(), out.end(), poly) == out.end()) out.push_back(std::move(poly));
  }
  if (out.size() > kMaxDisjuncts)
    throw DnfBlowup("guard expands to " + std::to_string(out.size()) + " disjuncts (limit " +
                    std::to_string(kMaxDisjuncts) + ")");
  return out;
}

Dnf conjoin(const Dnf& a, const Dnf& b) {
  if (a.size() * b.size() > kMaxDisjuncts * kMaxDisjuncts)
    throw DnfBlowup("guard conjunction expands beyond " + std::to_string(kMaxDisjuncts) + " disjuncts");
  Dnf out;
  for (const auto& p : a)
    for (const auto& q : b) {
      Polyhedron merged = p;
      merged.rows.insert(merged.rows.end(), q.rows.begin(), q.rows.end());
      out.push_back(std::move(merged));
    }
  return normalize(std::move(out));
}

Dnf disjoin(Dnf a, const Dnf& b) {
  a.insert(a.end(), b.begin(), b.end());
  return normalize(std::move(a));
}

class DnfBuilder {
 public:
  explicit DnfBuilder(const std::vector<std::string>& variables) : variables_(variables) {}

  Dnf build(const dsl::BoolExpr& expr, bool negated) {
    using Kind = dsl::BoolExpr::Kind;
    switch (expr.kind) {
      case Kind::True: return negated ? Dnf{} : Dnf{Polyhedron{}};
      case Kind::False: return negated ? Dnf{Polyhedron{}} : Dnf{};
      case Kind::Not: return build(*expr.left, !negated);
      case Kind::And:
      case Kind::Or: {
        Dnf l = build(*expr.left, negated);
        Dnf r = build(*expr.right, negated);
        bool conjunction = (expr.kind == Kind::And) != negated;
        return conjunction ? conjoin(l, r) : disjoin(std::move(l), r);
      }
      case Kind::Compare: {
        LinearRow row = atom(expr);
        if (negated) row = negate_row(row);
        return normalize(Dnf{Polyhedron{{row}}});
      }
    }
    return {};
  }

 private:
  LinearRow atom(const dsl::BoolExpr& cmp) const {
    auto lhs = dsl::to_affine(*cmp.lhs);
    auto rhs = dsl::to_affine(*cmp.rhs);
    if (!lhs || !rhs) throw GuardError("guard comparison '" + dsl::pretty_print(cmp) + "' is not affine");
    // diff = lhs - rhs; "lhs <= rhs" is diff <= 0.
    dsl::AffineForm diff = *lhs;
    for (const auto& [name, c] : rhs->coeffs) diff.coeffs[name] -= c;
    diff.constant -= rhs->constant;
    Rational sign = (cmp.op == dsl::CompareOp::Le || cmp.op == dsl::CompareOp::Lt) ? 1 : -1;
    LinearRow row;
    row.coeffs.assign(variables_.size(), Rational(0));
    for (const auto& [name, c] : diff.coeffs) {
      auto it = std::find(variables_.begin(), variables_.end(), name);
      if (it == variables_.end()) throw GuardError("guard mentions unknown variable '" + name + "'");
      row.coeffs[static_cast<std::size_t>(it - variables_.begin())] = sign * c;
    }
    row.bound = -sign * diff.constant;
    row.strict = cmp.op == dsl::CompareOp::Lt || cmp.op == dsl::CompareOp::Gt;
    return row;
  }

  const std::vector<std::string>& variables_;
};

}  // namespace

GuardDnf guard_to_dnf(const dsl::BoolExpr& guard, const std::vector<std::string>& variables) {
  GuardDnf out;
  out.dimension = variables.size();
  out.disjuncts = DnfBuilder(variables).build(guard, false);
  return out;
}

GuardDnf negate_guard(const GuardDnf& guard) {
  GuardDnf out;
  out.dimension = guard.dimension;
  Dnf acc{Polyhedron{}};
  for (const auto& poly : guard.disjuncts) {
    Dnf alternatives;
    for (const auto& row : poly.rows) alternatives.push_back(Polyhedron{{negate_row(row)}});
    acc = conjoin(acc, normalize(std::move(alternatives)));
    if (acc.empty()) break;
  }
  out.disjuncts = std::move(acc);
  return out;
}

std::string describe_row(const LinearRow& row, const std::vector<std::string>& variables) {
  std::string out;
  for (std::size_t i = 0; i < row.coeffs.size(); ++i) {
    const Rational& c = row.coeffs[i];
    if (c == 0) continue;
    std::string name = i < variables.size() ? variables[i] : "v" + std::to_string(i);
    Rational mag = c < 0 ? Rational(-c) : c;
    if (out.empty()) out += c < 0 ? "-" : "";
    else out += c < 0 ? " - " : " + ";
    if (mag != 1) out += to_decimal(mag, 10) + "*";
    out += name;
  }
  if (out.empty()) out = "0";
  return out + (row.strict ? " < " : " <= ") + to_decimal(row.bound, 10);
}

std::string describe_guard(const GuardDnf& guard, const std::vector<std::string>& variables) {
  if (guard.disjuncts.empty()) return "false";
  std::string out;
  for (std::size_t i = 0; i < guard.disjuncts.size(); ++i) {
    if (i) out += " or ";
    const auto& rows = guard.disjuncts[i].rows;
    if (rows.empty()) {
      out += "true";
      continue;
    }
    bool wrap = guard.disjuncts.size() > 1 && rows.size() > 1;
    if (wrap) out += "(";
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (j) out += " and ";
      out += describe_row(rows[j], variables);
    }
    if (wrap) out += ")";
  }
  return out;
}

}  // namespace psense::model
