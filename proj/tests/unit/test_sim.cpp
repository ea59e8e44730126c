#include "support.hpp"

#include "psense/cert/certificate.hpp"
#include "psense/sim/simulator.hpp"

#include <doctest.h>

#include <cmath>

using namespace psense;
using namespace psense::sim;

namespace {

std::vector<model::LoopModel> program(const std::string& file) {
  return testsupport::corpus_models(file);
}

cert::Certificate certificate_with(Rational A, Rational B) {
  cert::Certificate c;
  c.kind = cert::CertificateKind::Affine;
  c.A = std::move(A);
  c.B = std::move(B);
  c.witness.variables = {"x"};
  return c;
}

SimulationOptions options(std::uint64_t samples, std::uint64_t cap = 1000000, std::uint64_t seed = 1) {
  SimulationOptions o;
  o.samples = samples;
  o.cap = cap;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_CASE("run_loop on a Dirac walk") {
  CompiledLoop loop(program("misc/running-dirac.pprog").at(0));
  CHECK(loop.tape_width() == 2);
  RandomTape tape(1, 0, 0);
  auto out = run_loop(loop, {999}, tape, 100);
  CHECK(out.steps == 2);
  CHECK(out.final_state == State{1001});
  CHECK(!out.censored);

  RandomTape idle(1, 0, 0);
  auto outside = run_loop(loop, {1500}, idle, 100);
  CHECK(outside.steps == 0);
  CHECK(outside.final_state == State{1500});
}

TEST_CASE("identity loop is censored at the cap") {
  CompiledLoop loop(program("misc/identity-loop.pprog").at(0));
  RandomTape tape(1, 0, 0);
  auto out = run_loop(loop, {3}, tape, 100);
  CHECK(out.censored);
  CHECK(out.steps == 100);
}

TEST_CASE("tapes are reproducible") {
  RandomTape a(5, 7, 1), b(5, 7, 1), c(5, 8, 1);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    double x = a.next();
    CHECK(x == b.next());
    CHECK(x >= 0);
    CHECK(x < 1);
    differs |= x != c.next();
  }
  CHECK(differs);
}

TEST_CASE("expectation estimates") {
  CompiledProgram bern(program("misc/running-bern.pprog"));
  auto e = estimate_expectation(bern, {1000}, 0, options(20000));
  CHECK(e.mean == doctest::Approx(1001));
  CHECK(e.ci_half_width == doctest::Approx(0));

  CompiledProgram dirac(program("misc/running-dirac.pprog"));
  auto d = estimate_expectation(dirac, {998.5}, 0, options(100));
  CHECK(d.mean == doctest::Approx(1000.5));
  CHECK(d.ci_half_width == 0);

  // From x = 1000 one step of x + U(0,2) or x + U(0,5): mean 1001.75.
  CompiledProgram prdwalk(program("prdwalk.pprog"));
  auto p = estimate_expectation(prdwalk, {1000}, 0, options(20000));
  CHECK(std::abs(p.mean - 1001.75) <= 2 * p.ci_half_width + 1e-9);
  CHECK(p.ci_half_width < 0.05);
  CHECK(!p.is_censored());
}

TEST_CASE("termination time estimates") {
  CompiledProgram bern(program("misc/running-bern.pprog"));
  CHECK(estimate_termination_time(bern, {2000}, options(100)).mean == 0);
  // Geometric with success probability 1/2.
  auto t = estimate_termination_time(bern, {1000}, options(20000));
  CHECK(std::abs(t.mean - 2) <= 2 * t.ci_half_width);

  CompiledProgram identity(program("misc/identity-loop.pprog"));
  auto stuck = estimate_termination_time(identity, {1}, options(10, 50));
  CHECK(stuck.censored == 10);
  CHECK(stuck.is_censored());
}

TEST_CASE("coupled estimates") {
  CompiledProgram rdwalk(program("rdwalk.pprog"));
  auto same = coupled_estimate(rdwalk, {990}, {990}, 0, options(500));
  CHECK(same.mean == 0);
  CHECK(same.ci_half_width == 0);

  CompiledProgram dirac(program("misc/running-dirac.pprog"));
  auto shifted = coupled_estimate(dirac, {1000}, {999.5}, 0, options(50));
  CHECK(shifted.mean == doctest::Approx(0.5));
  CHECK(shifted.ci_half_width == 0);

  CompiledProgram two(program("misc/two-walks.pprog"));
  CHECK(two.loop_count() == 2);
  auto e = estimate_expectation(two, {1990}, 0, options(2000));
  CHECK(e.mean > 2000);
  CHECK(e.mean < 2001);
}

TEST_CASE("coupled distance never grows on non-expansive corpus loops") {
  for (const std::string file : {"rdwalk.pprog", "prdwalk.pprog", "mini-roulette.pprog", "ad-rdwalk-2d.pprog",
                                 "race.pprog", "simple-while-loop.pprog"}) {
    INFO(file);
    auto models = program(file);
    const auto& m = models.at(0);
    CompiledLoop loop(m);
    testsupport::Rng rng(31);
    for (int trial = 0; trial < 5; ++trial) {
      // Start from a guard point and a small perturbation of it.
      State v(m.dimension()), w(m.dimension());
      RationalVector rv;
      do {
        rv.clear();
        for (std::size_t i = 0; i < m.dimension(); ++i) rv.push_back(rng.rational(0, 40, 4));
      } while (!m.guard.contains(rv));
      for (std::size_t i = 0; i < m.dimension(); ++i) {
        v[i] = to_double(rv[i]);
        w[i] = v[i] + 0.25 * static_cast<double>(i + 1);
      }
      auto trace = coupled_distance_trace(loop, v, w, static_cast<std::uint64_t>(trial), 1000);
      for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-9);
    }
  }
}

TEST_CASE("simulation is deterministic for a fixed seed") {
  CompiledProgram prdwalk(program("prdwalk.pprog"));
  auto a = estimate_expectation(prdwalk, {900}, 0, options(500, 1000000, 42));
  auto b = estimate_expectation(prdwalk, {900}, 0, options(500, 1000000, 42));
  auto c = estimate_expectation(prdwalk, {900}, 0, options(500, 1000000, 43));
  CHECK(a.mean == b.mean);
  CHECK(a.ci_half_width == b.ci_half_width);
  CHECK(a.mean != c.mean);
}

TEST_CASE("bound check against affine certificates") {
  auto bern = program("misc/running-bern.pprog");
  auto report = empirical_bound_check(certificate_with(6, 4), bern,
                                      {{{Rational(500)}, {Rational(1001, 2)}}}, "x", options(2000));
  REQUIRE(report.pairs.size() == 1);
  CHECK(report.pairs[0].bound == doctest::Approx(7));
  CHECK(report.passed());

  auto rdwalk = program("rdwalk.pprog");
  auto rd = empirical_bound_check(certificate_with(12, 10), rdwalk, {{{Rational(990)}, {Rational(991)}}}, "x",
                                  options(2000));
  CHECK(rd.passed());
  CHECK(to_json(rd)["pairs"][0]["verdict"] == "pass");

  // A zero bound cannot absorb the overshoot difference.
  auto bad = empirical_bound_check(certificate_with(0, 0), program("misc/running-dirac.pprog"),
                                   {{{Rational(1000)}, {Rational(1999, 2)}}}, "x", options(100));
  CHECK(!bad.passed());
}

TEST_CASE("bound check rejects pairs outside the certified region") {
  auto models = program("mini-roulette-variant.pprog");
  auto cert = certificate_with(1, 0);
  cert.theta = Rational(1, 10);
  RationalVector v{Rational(10), Rational(0)}, far{Rational(11), Rational(0)};
  CHECK_THROWS_AS(empirical_bound_check(cert, models, {{v, far}}, "w", options(10)), PairOutsideRegion);
  auto rdwalk = program("rdwalk.pprog");
  CHECK_THROWS_AS(empirical_bound_check(certificate_with(12, 10), rdwalk, {{{Rational(1001)}, {Rational(1000)}}},
                                        "x", options(10)),
                  PairOutsideRegion);
}

TEST_CASE("bound check reports censored runs") {
  auto rdwalk = program("rdwalk.pprog");
  try {
    empirical_bound_check(certificate_with(12, 10), rdwalk, {{{Rational(0)}, {Rational(1)}}}, "x",
                          options(50, 10));
    FAIL("expected CensoredRuns");
  } catch (const CensoredRuns& e) {
    CHECK(e.report().censored());
    CHECK(!e.report().passed());
  }
}
