#include "psense/rsm/verify.hpp"

#include "psense/rsm/polyhedra.hpp"

#include <algorithm>
#include <stdexcept>

namespace psense::rsm {

bool VerificationReport::passed() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [&](const ConditionResult& c) { return c.passed(tolerance); });
}

const ConditionResult& VerificationReport::condition(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return c;
  throw std::out_of_range("no condition named " + name);
}

namespace {

// Tracks the smallest slack seen; an unbounded case poisons the margin.
class MarginAccumulator {
 public:
  void add(const std::optional<Rational>& slack) {
    ++cases_;
    if (!slack) {
      unbounded_ = true;
      return;
    }
    if (!margin_ || *slack < *margin_) margin_ = slack;
  }

  void fill(ConditionResult& out) const {
    out.checked = true;
    out.cases = cases_;
    if (unbounded_) out.margin = std::nullopt;
    else out.margin = margin_.value_or(Rational(0));
  }

 private:
  std::optional<Rational> margin_;
  bool unbounded_ = false;
  std::size_t cases_ = 0;
};

ConditionResult make_condition(const char* name, const char* description) {
  ConditionResult c;
  c.name = name;
  c.description = description;
  return c;
}

// Optimum of objective over poly; std::nullopt when unbounded.
std::optional<Rational> optimum(const lp::LinearConstraintSystem& poly, const lp::LinearObjective& objective,
                                lp::Sense sense, const lp::LpOptions& options) {
  if (objective.terms.empty()) return objective.constant;
  lp::LpOutcome out = lp::lp_solve(poly, objective, sense, options);
  if (out.status == lp::LpStatus::Unbounded) return std::nullopt;
  if (out.status == lp::LpStatus::Infeasible) throw lp::EmptyPolyhedron("verification case polyhedron is empty");
  return out.value;
}

std::optional<Rational> negate(const std::optional<Rational>& x) {
  if (!x) return std::nullopt;
  return Rational(-*x);
}

std::optional<Rational> shift(const std::optional<Rational>& x, const Rational& by) {
  if (!x) return std::nullopt;
  return *x + by;
}

// eta(F(res, v, r)) in joint coordinates of poly.
lp::LinearObjective eta_after(const model::LoopModel& model, const LinearFunction& eta, std::size_t res,
                              const JointPolyhedron& poly) {
  std::size_t n = model.dimension();
  const auto& update = model.resolutions[res].update;
  lp::LinearObjective out;
  for (std::size_t k = 0; k < n; ++k) {
    Rational c = 0;
    for (std::size_t z = 0; z < n; ++z) c += eta.coeffs[z] * update.B[z][k];
    if (c != 0) out.terms.push_back({k, c});
  }
  for (std::size_t q = 0; q < poly.columns.size(); ++q) {
    Rational c = 0;
    for (std::size_t z = 0; z < n; ++z) c += eta.coeffs[z] * update.C[z][poly.columns[q]];
    if (c != 0) out.terms.push_back({n + q, c});
  }
  out.constant = eta.offset;
  for (std::size_t z = 0; z < n; ++z) out.constant += eta.coeffs[z] * update.offset[z];
  return out;
}

lp::LinearObjective eta_objective(const LinearFunction& eta) {
  lp::LinearObjective out;
  for (std::size_t k = 0; k < eta.coeffs.size(); ++k)
    if (eta.coeffs[k] != 0) out.terms.push_back({k, eta.coeffs[k]});
  out.constant = eta.offset;
  return out;
}

}  // namespace

VerificationReport verify_witness(const model::LoopModel& model, const RsmWitness& witness, const Rational& tolerance,
                                  const lp::LpOptions& options) {
  if (witness.eta.coeffs.size() != model.dimension())
    throw std::invalid_argument("witness dimension does not match the loop model");
  std::size_t n = model.dimension();
  const LinearFunction& eta = witness.eta;
  std::vector<std::size_t> live = live_disjuncts(model, options);

  VerificationReport report;
  report.tolerance = tolerance;

  ConditionResult nonneg = make_condition("A1", "eta >= 0 on the guard");
  MarginAccumulator a1;
  for (std::size_t i : live)
    a1.add(optimum(guard_polyhedron(model, i), eta_objective(eta), lp::Sense::Minimize, options));
  a1.fill(nonneg);
  report.conditions.push_back(nonneg);

  ConditionResult exit = make_condition("A2", "K <= eta(v') <= 0 on exit");
  MarginAccumulator a2;
  for (std::size_t res = 0; res < model.resolutions.size(); ++res)
    for (std::size_t i : live)
      for (std::size_t j = 0; j < model.negated_guard.disjuncts.size(); ++j) {
        auto poly = exit_polyhedron(model, res, i, j, options);
        if (!poly) continue;
        lp::LinearObjective after = eta_after(model, eta, res, *poly);
        a2.add(negate(optimum(poly->system, after, lp::Sense::Maximize, options)));
        a2.add(shift(optimum(poly->system, after, lp::Sense::Minimize, options), -witness.K));
      }
  a2.fill(exit);
  report.conditions.push_back(exit);

  ConditionResult decrease = make_condition("A3", "E[eta(v')] <= eta(v) - epsilon on the guard");
  MarginAccumulator a3;
  for (std::size_t i : live) {
    // slack(v) = eta(v) - epsilon - sum_l p_l eta(F(l, v, mean))
    lp::LinearObjective slack = eta_objective(eta);
    slack.constant -= witness.epsilon;
    for (const auto& r : model.resolutions) {
      for (std::size_t k = 0; k < n; ++k) {
        Rational c = 0;
        for (std::size_t z = 0; z < n; ++z) c += eta.coeffs[z] * r.update.B[z][k];
        if (c != 0) slack.terms.push_back({k, -r.probability * c});
      }
      Rational constant = eta.offset;
      for (std::size_t z = 0; z < n; ++z) {
        Rational mean_value = r.update.offset[z];
        for (std::size_t col : r.columns_used) mean_value += r.update.C[z][col] * model.columns[col].distribution.mean;
        constant += eta.coeffs[z] * mean_value;
      }
      slack.constant -= r.probability * constant;
    }
    slack.terms = lp::compact(std::move(slack.terms));
    a3.add(optimum(guard_polyhedron(model, i), slack, lp::Sense::Minimize, options));
  }
  a3.fill(decrease);
  report.conditions.push_back(decrease);

  ConditionResult diff = make_condition("A4", "|eta(v') - eta(v)| <= c on the guard");
  if (witness.c) {
    MarginAccumulator a4;
    for (std::size_t res = 0; res < model.resolutions.size(); ++res)
      for (std::size_t i : live) {
        JointPolyhedron poly = step_polyhedron(model, res, i);
        lp::LinearObjective change = eta_after(model, eta, res, poly);
        for (std::size_t k = 0; k < n; ++k)
          if (eta.coeffs[k] != 0) change.terms.push_back({k, -eta.coeffs[k]});
        change.terms = lp::compact(std::move(change.terms));
        change.constant -= eta.offset;
        a4.add(shift(negate(optimum(poly.system, change, lp::Sense::Maximize, options)), *witness.c));
        a4.add(shift(optimum(poly.system, change, lp::Sense::Minimize, options), *witness.c));
      }
    a4.fill(diff);
  }
  report.conditions.push_back(diff);
  return report;
}

nlohmann::json to_json(const VerificationReport& report) {
  nlohmann::json conditions = nlohmann::json::array();
  for (const auto& c : report.conditions) {
    nlohmann::json entry = {{"name", c.name}, {"description", c.description}, {"checked", c.checked}, {"cases", c.cases}};
    if (c.checked) {
      entry["margin"] = c.margin ? nlohmann::json(to_string(*c.margin)) : nlohmann::json("-inf");
      entry["margin_decimal"] = c.margin ? to_decimal(*c.margin) : std::string("-inf");
      entry["passed"] = c.passed(report.tolerance);
    }
    conditions.push_back(entry);
  }
  return {{"tolerance", to_string(report.tolerance)}, {"passed", report.passed()}, {"conditions", conditions}};
}

}  // namespace psense::rsm
