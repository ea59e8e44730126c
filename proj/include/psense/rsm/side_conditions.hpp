#pragma once

#include "psense/lp/solver.hpp"
#include "psense/model/loop_model.hpp"
#include "psense/rsm/witness.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace psense::rsm {

class Unbounded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Smallest d with d(v, F(l, v, r)) <= d over the guard and the support.
Rational compute_bounded_update(const model::LoopModel& model, const Metric& metric,
                                const lp::LpOptions& options = lp::default_lp_options());

// Smallest c with |eta(F(l, v, r)) - eta(v)| <= c over the guard and support.
Rational compute_difference_bound(const model::LoopModel& model, const LinearFunction& eta,
                                  const lp::LpOptions& options = lp::default_lp_options());

// Lipschitz constant of eta with respect to the metric.
Rational compute_lipschitz_eta(const LinearFunction& eta, const Metric& metric);

// Lipschitz constant of the loop body: max over resolutions of the induced
// norm of B (an upper bound for the Euclidean metric).
Rational compute_body_lipschitz(const model::LoopModel& model, const Metric& metric);

struct NextStepLipschitz {
  bool holds = false;
  std::optional<Rational> constant;
  std::vector<std::string> reasons;
};

// Structural check that one-step termination probability is Lipschitz in the
// start state: sampled reads are continuous with bounded density and every
// guard row that can be crossed in one step has a sampled component.
NextStepLipschitz check_next_step_lipschitz(const model::LoopModel& model, const Metric& metric,
                                            const lp::LpOptions& options = lp::default_lp_options());

}  // namespace psense::rsm
