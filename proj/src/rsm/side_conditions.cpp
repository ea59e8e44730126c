#include "psense/rsm/side_conditions.hpp"

#include "psense/rsm/polyhedra.hpp"

#include <set>

namespace psense::rsm {

namespace {

Rational abs_value(const Rational& x) { return x < 0 ? Rational(-x) : x; }

struct Range {
  Rational lo;
  Rational hi;
};

// Range of objective over the polyhedron; throws Unbounded.
Range objective_range(const lp::LinearConstraintSystem& poly, const lp::LinearObjective& objective,
                      const lp::LpOptions& options, const std::string& what) {
  lp::LpOutcome hi = lp::lp_solve(poly, objective, lp::Sense::Maximize, options);
  if (hi.status == lp::LpStatus::Unbounded) throw Unbounded(what + " is unbounded above");
  lp::LpOutcome lo = lp::lp_solve(poly, objective, lp::Sense::Minimize, options);
  if (lo.status == lp::LpStatus::Unbounded) throw Unbounded(what + " is unbounded below");
  return {lo.value, hi.value};
}

std::string resolution_label(const model::LoopModel& model, std::size_t res) {
  const auto& r = model.resolutions[res];
  return "resolution " + std::to_string(res) + (r.path.empty() ? "" : " (" + r.path + ")");
}

}  // namespace

Rational compute_bounded_update(const model::LoopModel& model, const Metric& metric, const lp::LpOptions& options) {
  std::size_t n = model.dimension();
  Rational best = 0;
  std::vector<std::size_t> live = live_disjuncts(model, options);
  for (std::size_t res = 0; res < model.resolutions.size(); ++res) {
    const auto& update = model.resolutions[res].update;
    for (std::size_t i : live) {
      JointPolyhedron poly = step_polyhedron(model, res, i);
      for (std::size_t z = 0; z < n; ++z) {
        lp::LinearObjective change;
        for (std::size_t k = 0; k < n; ++k) {
          Rational coeff = update.B[z][k] - (k == z ? Rational(1) : Rational(0));
          if (coeff != 0) change.terms.push_back({k, coeff});
        }
        for (std::size_t q = 0; q < poly.columns.size(); ++q)
          if (update.C[z][poly.columns[q]] != 0) change.terms.push_back({n + q, update.C[z][poly.columns[q]]});
        change.constant = update.offset[z];
        if (change.terms.empty()) {
          best = std::max(best, abs_value(change.constant));
          continue;
        }
        Range range = objective_range(poly.system, change, options,
                                      "change of '" + model.program_variables[z] + "' in " + resolution_label(model, res));
        best = std::max({best, abs_value(range.lo), abs_value(range.hi)});
      }
    }
  }
  return metric.D2 * best;
}

Rational compute_difference_bound(const model::LoopModel& model, const LinearFunction& eta,
                                  const lp::LpOptions& options) {
  std::size_t n = model.dimension();
  Rational best = 0;
  std::vector<std::size_t> live = live_disjuncts(model, options);
  for (std::size_t res = 0; res < model.resolutions.size(); ++res) {
    const auto& update = model.resolutions[res].update;
    for (std::size_t i : live) {
      JointPolyhedron poly = step_polyhedron(model, res, i);
      lp::LinearObjective diff;
      for (std::size_t k = 0; k < n; ++k) {
        Rational coeff = -eta.coeffs[k];
        for (std::size_t z = 0; z < n; ++z) coeff += eta.coeffs[z] * update.B[z][k];
        if (coeff != 0) diff.terms.push_back({k, coeff});
      }
      for (std::size_t q = 0; q < poly.columns.size(); ++q) {
        Rational coeff = 0;
        for (std::size_t z = 0; z < n; ++z) coeff += eta.coeffs[z] * update.C[z][poly.columns[q]];
        if (coeff != 0) diff.terms.push_back({n + q, coeff});
      }
      for (std::size_t z = 0; z < n; ++z) diff.constant += eta.coeffs[z] * update.offset[z];
      if (diff.terms.empty()) {
        best = std::max(best, abs_value(diff.constant));
        continue;
      }
      Range range = objective_range(poly.system, diff, options, "one-step change of eta in " + resolution_label(model, res));
      best = std::max({best, abs_value(range.lo), abs_value(range.hi)});
    }
  }
  return best;
}

Rational compute_lipschitz_eta(const LinearFunction& eta, const Metric& metric) {
  if (metric.kind == MetricKind::Euclid) {
    Rational squares = 0;
    for (const auto& a : eta.coeffs) squares += a * a;
    return sqrt_upper(squares) / metric.D1;
  }
  Rational norm = 0;
  for (const auto& a : eta.coeffs) norm += abs_value(a);
  return norm / metric.D1;
}

Rational compute_body_lipschitz(const model::LoopModel& model, const Metric& metric) {
  Rational best = 0;
  for (const auto& res : model.resolutions) {
    const auto& B = res.update.B;
    Rational row_norm = 0;  // max absolute row sum
    Rational col_norm = 0;  // max absolute column sum
    for (std::size_t z = 0; z < B.size(); ++z) {
      Rational sum = 0;
      for (const auto& c : B[z]) sum += abs_value(c);
      row_norm = std::max(row_norm, sum);
    }
    for (std::size_t k = 0; k < B.size(); ++k) {
      Rational sum = 0;
      for (std::size_t z = 0; z < B.size(); ++z) sum += abs_value(B[z][k]);
      col_norm = std::max(col_norm, sum);
    }
    Rational norm = metric.kind == MetricKind::Max ? row_norm : sqrt_upper(row_norm * col_norm);
    best = std::max(best, norm);
  }
  return best;
}

NextStepLipschitz check_next_step_lipschitz(const model::LoopModel& model, const Metric& metric,
                                            const lp::LpOptions& options) {
  NextStepLipschitz result;
  std::size_t n = model.dimension();

  std::set<std::size_t> reported;
  for (const auto& res : model.resolutions) {
    for (std::size_t col : res.columns_used) {
      const auto& column = model.columns[col];
      if (column.distribution.continuous() && column.distribution.density_bound) continue;
      if (!reported.insert(col).second) continue;
      result.reasons.push_back("sampling variable '" + column.variable + "' read at line " +
                               std::to_string(column.span.line) + " has a " + column.distribution.describe() +
                               " distribution without a bounded density");
    }
  }

  std::vector<std::size_t> live = live_disjuncts(model, options);
  Rational total = 0;
  for (std::size_t res = 0; res < model.resolutions.size(); ++res) {
    const auto& r = model.resolutions[res];
    const auto& update = r.update;
    Rational per_resolution = 0;
    for (std::size_t i : live) {
      for (const auto& row : model.guard.disjuncts[i].rows) {
        Rational state_norm = 0;
        for (std::size_t k = 0; k < n; ++k) {
          Rational h = 0;
          for (std::size_t z = 0; z < n; ++z) h += row.coeffs[z] * update.B[z][k];
          state_norm += abs_value(h);
        }
        // Best sampled column: smallest density / |coefficient|.
        std::optional<Rational> best;
        bool any_sample = false;
        for (std::size_t col : r.columns_used) {
          Rational g = 0;
          for (std::size_t z = 0; z < n; ++z) g += row.coeffs[z] * update.C[z][col];
          if (g == 0) continue;
          any_sample = true;
          const auto& dist = model.columns[col].distribution;
          if (!dist.continuous() || !dist.density_bound) continue;
          Rational ratio = *dist.density_bound / abs_value(g);
          if (!best || ratio < *best) best = ratio;
        }
        if (best) {
          per_resolution += *best * state_norm;
          continue;
        }
        if (any_sample) continue;  // already reported as a discrete read
        // No sampled component: the row must never be crossed from the guard.
        bool crossable = false;
        for (std::size_t k : live) {
          JointPolyhedron poly = step_polyhedron(model, res, k);
          lp::Constraint pulled = pull_back(model, res, row, poly);
          lp::LinearObjective lhs{pulled.terms, Rational(0)};
          Rational limit = pulled.bound;
          if (lhs.terms.empty()) {
            crossable = row.strict ? !(Rational(0) < limit) : !(Rational(0) <= limit);
          } else {
            lp::LpOutcome hi = lp::lp_solve(poly.system, lhs, lp::Sense::Maximize, options);
            if (hi.status == lp::LpStatus::Unbounded) crossable = true;
            else if (hi.status == lp::LpStatus::Optimal)
              crossable = row.strict ? !(hi.value < limit) : !(hi.value <= limit);
          }
          if (crossable) break;
        }
        if (crossable)
          result.reasons.push_back("guard row '" + model::describe_row(row, model.program_variables) +
                                   "' can be crossed by " + resolution_label(model, res) +
                                   " whose update has no sampled component on it");
      }
    }
    total += r.probability * per_resolution;
  }
  result.holds = result.reasons.empty();
  if (result.holds) result.constant = total / metric.D1;
  return result;
}

}  // namespace psense::rsm
