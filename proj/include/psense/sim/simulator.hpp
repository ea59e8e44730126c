#pragma once

#include "psense/cert/certificate.hpp"
#include "psense/model/loop_model.hpp"

#include <json.hpp>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace psense::sim {

using State = std::vector<double>;

// Uniform draws in [0, 1) for one trial of one loop. Two streams built from
// the same (seed, trial, loop) produce the same tape.
class RandomTape {
 public:
  RandomTape(std::uint64_t seed, std::uint64_t trial, std::uint64_t loop);
  double next();

 private:
  std::mt19937_64 engine_;
};

// A loop model lowered to doubles. Every iteration reads exactly
// tape_width() draws: one for the resolution, then one per sampling column.
class CompiledLoop {
 public:
  explicit CompiledLoop(const model::LoopModel& model);

  std::size_t dimension() const { return dimension_; }
  std::size_t tape_width() const { return 1 + columns_.size(); }
  bool guard_holds(const State& v) const;

  // Scratch space for step(), reusable across iterations.
  struct Workspace {
    State next;
    std::vector<double> draws;
  };
  // One iteration: consumes tape_width() draws.
  void step(State& v, Workspace& work, RandomTape& tape) const;

 private:
  struct Row {
    std::vector<double> coeffs;
    double bound;
    bool strict;
  };
  struct Update {
    double cumulative;  // upper end of this resolution's probability slot
    std::vector<std::vector<double>> B;
    std::vector<std::vector<double>> C;
    std::vector<double> offset;
  };
  struct Sampler {
    DistributionKind kind;
    double lo;
    double hi;
    std::vector<std::pair<double, double>> cumulative_atoms;  // (upper cdf, value)
    double sample(double u) const;
  };

  std::size_t dimension_ = 0;
  std::vector<std::vector<Row>> guard_;
  std::vector<Update> updates_;
  std::vector<Sampler> columns_;
};

struct RunResult {
  State final_state;
  std::uint64_t steps = 0;
  bool censored = false;
};

// Runs one loop from v0 until the guard fails or `cap` iterations.
RunResult run_loop(const CompiledLoop& loop, State v0, RandomTape& tape, std::uint64_t cap);

// The loops of a program in order over one state vector.
class CompiledProgram {
 public:
  explicit CompiledProgram(const std::vector<model::LoopModel>& models);

  std::size_t dimension() const { return dimension_; }
  std::size_t loop_count() const { return loops_.size(); }
  // Trial `trial` from v0; every loop gets its own tape.
  RunResult run(const State& v0, std::uint64_t seed, std::uint64_t trial, std::uint64_t cap) const;
  const CompiledLoop& loop(std::size_t i) const { return loops_[i]; }

 private:
  std::size_t dimension_ = 0;
  std::vector<CompiledLoop> loops_;
};

struct SimulationOptions {
  std::uint64_t samples = 10000;
  std::uint64_t cap = 10000000;  // per loop
  std::uint64_t seed = 1;
};

struct SimulationEstimate {
  double mean = 0;
  double ci_half_width = 0;  // 95%, normal approximation
  std::uint64_t samples = 0;
  std::uint64_t censored = 0;
  std::uint64_t step_cap = 0;

  bool is_censored() const { return censored > 0; }
};

SimulationEstimate estimate_expectation(const CompiledProgram& program, const State& v0, std::size_t variable,
                                        const SimulationOptions& options);

SimulationEstimate estimate_termination_time(const CompiledProgram& program, const State& v0,
                                             const SimulationOptions& options);

// Mean and CI of z(v0) - z(v0') with both runs of a trial on one tape.
SimulationEstimate coupled_estimate(const CompiledProgram& program, const State& v0, const State& v0_prime,
                                    std::size_t variable, const SimulationOptions& options);

// Max-norm distance between coupled runs of one loop after each iteration
// in which both were still inside the guard.
std::vector<double> coupled_distance_trace(const CompiledLoop& loop, const State& v0, const State& v0_prime,
                                           std::uint64_t seed, std::uint64_t iterations);

class PairOutsideRegion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PairCheck {
  State v;
  State v_prime;
  double distance = 0;
  double bound = 0;
  double delta = 0;
  double ci = 0;
  std::uint64_t censored = 0;
  bool passed = false;
};

struct BoundCheckReport {
  std::string variable;
  std::vector<PairCheck> pairs;
  SimulationOptions options;

  bool censored() const;
  bool passed() const;  // every pair passed and nothing censored
};

class CensoredRuns : public std::runtime_error {
 public:
  CensoredRuns(const std::string& message, BoundCheckReport report)
      : std::runtime_error(message), report_(std::move(report)) {}
  const BoundCheckReport& report() const { return report_; }

 private:
  BoundCheckReport report_;
};

// Checks |E_v(z) - E_v'(z)| - ci <= A d(v, v') + B for every pair. Throws
// PairOutsideRegion before simulating and CensoredRuns after.
BoundCheckReport empirical_bound_check(const cert::Certificate& certificate,
                                       const std::vector<model::LoopModel>& models,
                                       const std::vector<std::pair<RationalVector, RationalVector>>& pairs,
                                       const std::string& variable, const SimulationOptions& options);

nlohmann::json to_json(const SimulationEstimate& estimate);
nlohmann::json to_json(const BoundCheckReport& report);

}  // namespace psense::sim
