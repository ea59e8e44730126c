#include "psense/sim/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace psense::sim {

namespace {

constexpr double kZ95 = 1.96;

// Welford accumulator for mean and sample variance.
class Moments {
 public:
  void add(double x) {
    ++count_;
    long double delta = x - mean_;
    mean_ += delta / static_cast<long double>(count_);
    m2_ += delta * (x - mean_);
  }

  SimulationEstimate estimate(std::uint64_t censored, std::uint64_t cap) const {
    SimulationEstimate out;
    out.samples = count_;
    out.censored = censored;
    out.step_cap = cap;
    out.mean = static_cast<double>(mean_);
    if (count_ > 1) {
      long double variance = m2_ / static_cast<long double>(count_ - 1);
      out.ci_half_width = static_cast<double>(kZ95 * std::sqrt(variance / static_cast<long double>(count_)));
    }
    return out;
  }

 private:
  std::uint64_t count_ = 0;
  long double mean_ = 0;
  long double m2_ = 0;
};

std::vector<double> to_doubles(const RationalVector& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(to_double(x));
  return out;
}

void require_dimension(const CompiledProgram& program, const State& v) {
  if (v.size() != program.dimension())
    throw std::invalid_argument("start state has " + std::to_string(v.size()) + " values, the program has " +
                                std::to_string(program.dimension()) + " variables");
}

}  // namespace

RandomTape::RandomTape(std::uint64_t seed, std::uint64_t trial, std::uint64_t loop) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(loop)};
  engine_.seed(seq);
}

double RandomTape::next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double CompiledLoop::Sampler::sample(double u) const {
  switch (kind) {
    case DistributionKind::Uniform: return lo + u * (hi - lo);
    case DistributionKind::Dirac: return lo;
    case DistributionKind::Bernoulli:
    case DistributionKind::Discrete:
      for (const auto& [cdf, value] : cumulative_atoms)
        if (u < cdf) return value;
      return cumulative_atoms.back().second;
  }
  return lo;
}

CompiledLoop::CompiledLoop(const model::LoopModel& model) : dimension_(model.dimension()) {
  for (const auto& disjunct : model.guard.disjuncts) {
    std::vector<Row> rows;
    for (const auto& row : disjunct.rows) rows.push_back({to_doubles(row.coeffs), to_double(row.bound), row.strict});
    guard_.push_back(std::move(rows));
  }
  Rational cumulative = 0;
  for (const auto& res : model.resolutions) {
    cumulative += res.probability;
    Update u;
    u.cumulative = to_double(cumulative);
    for (const auto& row : res.update.B) u.B.push_back(to_doubles(row));
    for (const auto& row : res.update.C) u.C.push_back(to_doubles(row));
    u.offset = to_doubles(res.update.offset);
    updates_.push_back(std::move(u));
  }
  if (!updates_.empty()) updates_.back().cumulative = 1.0;
  for (const auto& column : model.columns) {
    const auto& dist = column.distribution;
    Sampler s{dist.kind, to_double(dist.support_lo), to_double(dist.support_hi), {}};
    Rational cdf = 0;
    for (const auto& [value, probability] : dist.atoms) {
      cdf += probability;
      s.cumulative_atoms.emplace_back(to_double(cdf), to_double(value));
    }
    columns_.push_back(std::move(s));
  }
}

bool CompiledLoop::guard_holds(const State& v) const {
  for (const auto& rows : guard_) {
    bool all = true;
    for (const auto& row : rows) {
      double lhs = 0;
      for (std::size_t k = 0; k < dimension_; ++k) lhs += row.coeffs[k] * v[k];
      if (row.strict ? !(lhs < row.bound) : !(lhs <= row.bound)) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

void CompiledLoop::step(State& v, Workspace& work, RandomTape& tape) const {
  double pick = tape.next();
  work.draws.resize(columns_.size());
  for (std::size_t q = 0; q < columns_.size(); ++q) work.draws[q] = columns_[q].sample(tape.next());
  const Update* chosen = &updates_.back();
  for (const auto& u : updates_)
    if (pick < u.cumulative) {
      chosen = &u;
      break;
    }
  work.next.assign(dimension_, 0.0);
  for (std::size_t z = 0; z < dimension_; ++z) {
    double value = chosen->offset[z];
    const auto& brow = chosen->B[z];
    for (std::size_t k = 0; k < dimension_; ++k)
      if (brow[k] != 0.0) value += brow[k] * v[k];
    const auto& crow = chosen->C[z];
    for (std::size_t q = 0; q < columns_.size(); ++q)
      if (crow[q] != 0.0) value += crow[q] * work.draws[q];
    work.next[z] = value;
  }
  v.swap(work.next);
}

RunResult run_loop(const CompiledLoop& loop, State v0, RandomTape& tape, std::uint64_t cap) {
  RunResult out;
  CompiledLoop::Workspace work;
  out.final_state = std::move(v0);
  while (loop.guard_holds(out.final_state)) {
    if (out.steps >= cap) {
      out.censored = true;
      break;
    }
    loop.step(out.final_state, work, tape);
    ++out.steps;
  }
  return out;
}

CompiledProgram::CompiledProgram(const std::vector<model::LoopModel>& models) {
  if (models.empty()) throw std::invalid_argument("program has no loops to simulate");
  dimension_ = models.front().dimension();
  for (const auto& m : models) loops_.emplace_back(m);
}

RunResult CompiledProgram::run(const State& v0, std::uint64_t seed, std::uint64_t trial, std::uint64_t cap) const {
  RunResult total;
  total.final_state = v0;
  for (std::size_t i = 0; i < loops_.size(); ++i) {
    RandomTape tape(seed, trial, i);
    RunResult part = run_loop(loops_[i], std::move(total.final_state), tape, cap);
    total.final_state = std::move(part.final_state);
    total.steps += part.steps;
    if (part.censored) {
      total.censored = true;
      break;
    }
  }
  return total;
}

SimulationEstimate estimate_expectation(const CompiledProgram& program, const State& v0, std::size_t variable,
                                        const SimulationOptions& options) {
  require_dimension(program, v0);
  Moments moments;
  std::uint64_t censored = 0;
  for (std::uint64_t trial = 0; trial < options.samples; ++trial) {
    RunResult r = program.run(v0, options.seed, trial, options.cap);
    if (r.censored) ++censored;
    else moments.add(r.final_state[variable]);
  }
  return moments.estimate(censored, options.cap);
}

SimulationEstimate estimate_termination_time(const CompiledProgram& program, const State& v0,
                                             const SimulationOptions& options) {
  require_dimension(program, v0);
  Moments moments;
  std::uint64_t censored = 0;
  for (std::uint64_t trial = 0; trial < options.samples; ++trial) {
    RunResult r = program.run(v0, options.seed, trial, options.cap);
    if (r.censored) ++censored;
    else moments.add(static_cast<double>(r.steps));
  }
  return moments.estimate(censored, options.cap);
}

SimulationEstimate coupled_estimate(const CompiledProgram& program, const State& v0, const State& v0_prime,
                                    std::size_t variable, const SimulationOptions& options) {
  require_dimension(program, v0);
  require_dimension(program, v0_prime);
  Moments moments;
  std::uint64_t censored = 0;
  for (std::uint64_t trial = 0; trial < options.samples; ++trial) {
    RunResult a = program.run(v0, options.seed, trial, options.cap);
    RunResult b = program.run(v0_prime, options.seed, trial, options.cap);
    if (a.censored || b.censored) ++censored;
    else moments.add(a.final_state[variable] - b.final_state[variable]);
  }
  return moments.estimate(censored, options.cap);
}

std::vector<double> coupled_distance_trace(const CompiledLoop& loop, const State& v0, const State& v0_prime,
                                           std::uint64_t seed, std::uint64_t iterations) {
  RandomTape tape_a(seed, 0, 0);
  RandomTape tape_b(seed, 0, 0);
  State a = v0;
  State b = v0_prime;
  CompiledLoop::Workspace work;
  std::vector<double> trace;
  for (std::uint64_t i = 0; i < iterations && loop.guard_holds(a) && loop.guard_holds(b); ++i) {
    loop.step(a, work, tape_a);
    loop.step(b, work, tape_b);
    double dist = 0;
    for (std::size_t k = 0; k < a.size(); ++k) dist = std::max(dist, std::abs(a[k] - b[k]));
    trace.push_back(dist);
  }
  return trace;
}

bool BoundCheckReport::censored() const {
  return std::any_of(pairs.begin(), pairs.end(), [](const PairCheck& p) { return p.censored > 0; });
}

bool BoundCheckReport::passed() const {
  return !censored() && std::all_of(pairs.begin(), pairs.end(), [](const PairCheck& p) { return p.passed; });
}

BoundCheckReport empirical_bound_check(const cert::Certificate& certificate,
                                       const std::vector<model::LoopModel>& models,
                                       const std::vector<std::pair<RationalVector, RationalVector>>& pairs,
                                       const std::string& variable, const SimulationOptions& options) {
  if (models.empty()) throw std::invalid_argument("program has no loops");
  const model::LoopModel& head = models.front();
  std::size_t z = head.variable_index(variable);
  const rsm::Metric& metric = certificate.witness.metric;

  BoundCheckReport report;
  report.variable = variable;
  report.options = options;
  for (const auto& [v, v_prime] : pairs) {
    if (v.size() != head.dimension() || v_prime.size() != head.dimension())
      throw std::invalid_argument("pair dimension does not match the program");
    PairCheck check;
    check.v = to_doubles(v);
    check.v_prime = to_doubles(v_prime);
    check.distance = metric.distance(check.v, check.v_prime);
    if (!head.guard.contains(v) || !head.guard.contains(v_prime))
      throw PairOutsideRegion("pair is not inside the loop guard '" + head.guard_text + "'");
    if (certificate.theta && check.distance > to_double(*certificate.theta) * (1 + 1e-12))
      throw PairOutsideRegion("pair distance " + std::to_string(check.distance) + " exceeds the threshold " +
                              to_decimal(*certificate.theta));
    if (certificate.center && certificate.rho) {
      State center = to_doubles(*certificate.center);
      double rho = to_double(*certificate.rho) * (1 + 1e-12);
      if (metric.distance(check.v, center) > rho || metric.distance(check.v_prime, center) > rho)
        throw PairOutsideRegion("pair leaves the neighbourhood of radius " + to_decimal(*certificate.rho) +
                                " around the certificate centre");
    }
    report.pairs.push_back(std::move(check));
  }

  CompiledProgram program(models);
  for (auto& check : report.pairs) {
    SimulationEstimate delta = coupled_estimate(program, check.v, check.v_prime, z, options);
    check.bound = to_double(certificate.A) * check.distance + to_double(certificate.B);
    check.delta = delta.mean;
    check.ci = delta.ci_half_width;
    check.censored = delta.censored;
    check.passed = delta.censored == 0 && std::abs(delta.mean) - delta.ci_half_width <= check.bound;
  }
  if (report.censored())
    throw CensoredRuns("some runs hit the step cap of " + std::to_string(options.cap), std::move(report));
  return report;
}

nlohmann::json to_json(const SimulationEstimate& e) {
  return {{"mean", e.mean},         {"ci", e.ci_half_width},  {"samples", e.samples},
          {"censored", e.censored}, {"step_cap", e.step_cap}, {"is_censored", e.is_censored()}};
}

nlohmann::json to_json(const BoundCheckReport& report) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : report.pairs) {
    pairs.push_back({{"v", p.v},
                     {"v_prime", p.v_prime},
                     {"dist", p.distance},
                     {"bound", p.bound},
                     {"delta", p.delta},
                     {"ci", p.ci},
                     {"censored", p.censored},
                     {"verdict", p.censored ? "censored" : (p.passed ? "pass" : "fail")}});
  }
  return {{"variable", report.variable},
          {"samples", report.options.samples},
          {"cap", report.options.cap},
          {"seed", report.options.seed},
          {"pairs", pairs},
          {"passed", report.passed()}};
}

}  // namespace psense::sim
