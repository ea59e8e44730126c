#include "support.hpp"

#include "psense/cert/certificate.hpp"
#include "psense/cert/interval.hpp"

#include <doctest.h>

#include <cmath>

using namespace psense;
using namespace psense::cert;
using testsupport::Rng;

namespace {

rsm::RsmWitness witness(RationalVector coeffs, Rational offset, Rational epsilon, Rational K) {
  rsm::RsmWitness w;
  w.variables = {"x"};
  w.eta = rsm::LinearFunction{std::move(coeffs), std::move(offset)};
  w.epsilon = std::move(epsilon);
  w.K = std::move(K);
  w.L = 1;
  return w;
}

rsm::RsmWitness affine_witness(Rational d, Rational M, Rational epsilon, Rational K) {
  auto w = witness({M}, 0, std::move(epsilon), std::move(K));
  w.d = std::move(d);
  w.M = std::move(M);
  return w;
}

// simple-while-loop: eta = -2x + 2000, eps 1, K -2, d 1, M 2, c 2, L' 1.
rsm::RsmWitness simple_loop_witness() {
  auto w = witness({-2}, 2000, 1, -2);
  w.d = 1;
  w.M = 2;
  w.c = 2;
  w.Lprime = 1;
  return w;
}

// Smallest n with (n - 1) eps / 2 <= c + 1 < n eps / 2, by enumeration.
unsigned long partition_by_search(const Rational& eps, const Rational& c) {
  for (unsigned long n = 1;; ++n)
    if ((n - 1) * eps / 2 <= c + 1 && c + 1 < n * eps / 2) return n;
}

}  // namespace

TEST_CASE("affine certificate examples") {
  auto rd = affine_certificate(affine_witness(1, 5, 1, -5), "guard");
  CHECK(rd.A == 12);
  CHECK(rd.B == 10);
  CHECK(!rd.theta);
  CHECK(rd.kind == CertificateKind::Affine);

  auto running = affine_certificate(affine_witness(1, 1, Rational(1, 2), -1), "guard");
  CHECK(running.A == 6);
  CHECK(running.B == 4);

  auto still = affine_certificate(affine_witness(0, 3, 1, -4), "guard");
  CHECK(still.A == 2);
  CHECK(still.B == 0);
}

TEST_CASE("affine certificate prerequisites") {
  auto expansive = affine_witness(1, 1, 1, -1);
  expansive.L = Rational(3, 2);
  CHECK_THROWS_AS(affine_certificate(expansive, "g"), NotNonExpansive);
  auto no_d = affine_witness(1, 1, 1, -1);
  no_d.d.reset();
  CHECK_THROWS_AS(affine_certificate(no_d, "g"), NoBoundedUpdate);
  auto no_L = affine_witness(1, 1, 1, -1);
  no_L.L.reset();
  try {
    affine_certificate(no_L, "g");
    FAIL("expected MissingSideCondition");
  } catch (const MissingSideCondition& e) {
    CHECK(e.name() == "L");
  }
}

TEST_CASE("affine coefficients are monotone in d, M, -K and antitone in epsilon") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Rational d = rng.rational(0, 10, 4), M = rng.rational(1, 10, 4), eps = rng.rational(1, 4, 4),
             K = -rng.rational(0, 10, 4);
    auto base = affine_certificate(affine_witness(d, M, eps, K), "g");
    CHECK(base.A >= 0);
    CHECK(base.B >= 0);
    auto more_d = affine_certificate(affine_witness(d + 1, M, eps, K), "g");
    auto more_M = affine_certificate(affine_witness(d, M + 1, eps, K), "g");
    auto lower_K = affine_certificate(affine_witness(d, M, eps, K - 1), "g");
    auto more_eps = affine_certificate(affine_witness(d, M, eps + 1, K), "g");
    CHECK(more_d.A >= base.A);
    CHECK(more_d.B >= base.B);
    CHECK(more_M.A >= base.A);
    CHECK(lower_K.B >= base.B);
    CHECK(more_eps.A <= base.A);
    CHECK(more_eps.B <= base.B);
  }
}

TEST_CASE("termination bound") {
  auto rdwalk = testsupport::corpus_model("rdwalk.pprog");
  CHECK(termination_bound(witness({-5}, 5000, 1, -5), rdwalk, {Rational(900)}) == 505);
  auto bern = testsupport::corpus_model("misc/running-bern.pprog");
  CHECK(termination_bound(witness({-1}, 1000, Rational(1, 2), -1), bern, {Rational(1000)}) == 2);
  CHECK(termination_bound(witness({-1}, 1000, 1, 0), bern, {Rational(1000)}) == 0);
  CHECK_THROWS_AS(termination_bound(witness({-5}, 5000, 1, -5), rdwalk, {Rational(1001)}), OutsideGuard);
}

TEST_CASE("minimal decrease probability") {
  CHECK(minimal_decrease_probability(1, 1) == 1);
  CHECK(minimal_decrease_probability(1, Rational(2205, 100)) == Rational(10, 431));
  CHECK(minimal_decrease_probability(2, 3) == Rational(1, 2));
  CHECK_THROWS_AS(minimal_decrease_probability(2, 1), BadParameters);
}

TEST_CASE("partition size matches the defining sandwich") {
  CHECK(partition_size(1, 1) == 5);
  CHECK(partition_size(1, Rational(2205, 100)) == 47);
  // (n - 1) <= 3 < n gives 4 for eps = c = 2.
  CHECK(partition_size(2, 2) == 4);
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    Rational eps = rng.rational(1, 20, 8);
    Rational c = eps + rng.rational(0, 30, 8);
    unsigned long n = partition_size(eps, c);
    CHECK(n == partition_by_search(eps, c));
    CHECK(n >= 3);
  }
  CHECK_THROWS_AS(partition_size(3, 1), BadParameters);
}

TEST_CASE("coefficient chain examples") {
  auto zero = solve_coefficient_chain(4, 0, 3, Rational(1, 3));
  for (const auto& a : zero.A) CHECK(a == 3);
  CHECK(zero.A_inf == 3);

  auto half = solve_coefficient_chain(1, 1, 0, Rational(1, 2));
  CHECK(half.A_inf == 6);
  CHECK(half.A == RationalVector{0, 4});
  CHECK(testsupport::chain_violation(half, 1, 1, 0, Rational(1, 2)).empty());

  auto one = solve_coefficient_chain(2, 1, 1, 1);
  CHECK(one.A_inf == 4);
  CHECK(one.A == RationalVector{1, 2, 3});
}

TEST_CASE("coefficient chain satisfies its inequalities on random inputs") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    unsigned long n = static_cast<unsigned long>(rng.integer(1, 10));
    Rational C = rng.rational(0, 20, 7), D = rng.rational(0, 5, 3);
    Rational p = trial % 10 == 0 ? Rational(1) : Rational(rng.integer(1, 99), 100);
    auto chain = solve_coefficient_chain(n, C, D, p);
    INFO("n=" << n << " C=" << to_string(C) << " D=" << to_string(D) << " p=" << to_string(p));
    CHECK(testsupport::chain_violation(chain, n, C, D, p) == "");
    auto iterated = testsupport::iterate_chain(n, C, D, p);
    CHECK(chain.A_inf == iterated.A_inf);
    CHECK(chain.A == iterated.A);
  }
  CHECK_THROWS_AS(solve_coefficient_chain(0, 1, 1, Rational(1, 2)), BadParameters);
  CHECK_THROWS_AS(solve_coefficient_chain(2, 1, 1, 0), BadParameters);
}

TEST_CASE("linear certificate for the simple while loop") {
  auto cert = linear_certificate(simple_loop_witness(), "guard");
  CHECK(cert.kind == CertificateKind::Linear);
  REQUIRE(cert.p);
  CHECK(*cert.p == Rational(1, 3));
  REQUIRE(cert.partition);
  CHECK(*cert.partition == partition_by_search(1, 2));
  CHECK(*cert.Cprime == Rational(7, 2));
  CHECK(*cert.C == Rational(7, 2));
  CHECK(*cert.D == 1);
  CHECK(cert.theta == Rational(1, 2));
  CHECK(cert.B == 0);
  REQUIRE(cert.chain);
  CHECK(cert.A == cert.chain->A_inf);
  CHECK(testsupport::chain_violation(*cert.chain, *cert.partition, *cert.C, *cert.D, *cert.p) == "");
}

TEST_CASE("linear certificate side conditions") {
  auto no_lprime = simple_loop_witness();
  no_lprime.Lprime.reset();
  try {
    linear_certificate(no_lprime, "g");
    FAIL("expected MissingSideCondition");
  } catch (const MissingSideCondition& e) {
    CHECK(e.name() == "L'");
  }
  auto no_c = simple_loop_witness();
  no_c.c.reset();
  CHECK_THROWS_AS(linear_certificate(no_c, "g"), MissingSideCondition);

  auto small = simple_loop_witness();
  small.Lprime = Rational(1, 10);
  CHECK(*linear_certificate(small, "g").C == 1);
}

TEST_CASE("exp enclosure") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    Rational x = rng.rational(-6, 6, 1000);
    auto box = exp_interval(x, 128);
    double e = std::exp(to_double(x));
    CHECK(to_double(box.lo) <= e * (1 + 1e-15));
    CHECK(to_double(box.hi) >= e * (1 - 1e-15));
    CHECK(box.width() < Rational(1, 1000000000000LL));
  }
  auto e375 = exp_interval(Rational(3, 8));
  CHECK(e375.lo > Rational(14549, 10000));
  CHECK(e375.hi < Rational(14550, 10000));
  CHECK(pow_upper(Rational(6, 5), 41) >= pow(Rational(6, 5), 41));
}

TEST_CASE("expansive certificate example") {
  auto m = testsupport::corpus_model("misc/expansive-drift.pprog");
  auto w = witness({1}, 0, 1, -1);
  w.c = 1;
  w.d = 1;
  w.M = 1;
  w.L = Rational(6, 5);
  auto cert = expansive_certificate(w, m, {Rational(10)});
  REQUIRE(cert.N);
  CHECK(*cert.N == 41);
  CHECK(*cert.rho == 5);
  // Closed forms in long double: A' = 2, B' = 1.
  long double s = std::exp(-3.0L / 8.0L), q = 1.2L * s, t = std::exp(-10.0L / 8.0L);
  long double LN = std::pow(1.2L, 41.0L);
  long double A = 2 * 2 * LN * (1 + t * q / (1 - q));
  long double B = 2 * 1 * (1 + t * s / (1 - s));
  // Truncated series for the same quantities.
  long double series_A = 0, series_B = 0;
  for (int k = 1; k < 2000; ++k) {
    series_A += std::pow(q, (long double)k);
    series_B += std::pow(s, (long double)k);
  }
  CHECK(std::abs(A - 2 * 2 * LN * (1 + t * series_A)) / A < 1e-12L);
  CHECK(std::abs(B - 2 * (1 + t * series_B)) / B < 1e-12L);
  double got_A = to_double(cert.A), got_B = to_double(cert.B);
  CHECK(got_A >= static_cast<double>(A) * (1 - 1e-12));
  CHECK(std::abs(got_A - static_cast<double>(A)) / got_A < 1e-10);
  CHECK(got_B >= static_cast<double>(B) * (1 - 1e-12));
  CHECK(std::abs(got_B - static_cast<double>(B)) / got_B < 1e-10);
}

TEST_CASE("expansive certificate rejections") {
  auto m = testsupport::corpus_model("misc/expansive-drift.pprog");
  auto w = witness({1}, 0, 1, -1);
  w.c = 1;
  w.d = 1;
  w.M = 1;
  w.L = Rational(3, 2);
  CHECK_THROWS_AS(expansive_certificate(w, m, {Rational(10)}), ExpansionTooFast);
  w.L = 1;
  auto flat = expansive_certificate(w, m, {Rational(10)});
  CHECK(flat.A > 0);
  CHECK(flat.B > 0);
  CHECK_THROWS_AS(expansive_certificate(w, m, {Rational(200)}), CenterInfeasible);
  CHECK_THROWS_AS(expansive_certificate(w, m, {Rational(0)}), CenterInfeasible);
}

TEST_CASE("sequential affine composition") {
  Certificate unit;
  unit.A = 1;
  unit.B = 0;
  auto head = affine_witness(2, 3, 1, -4);
  auto skip_like = compose_affine(head, unit, "g", true);
  CHECK(skip_like.A == 2 * (1 + Rational(6)));
  CHECK(skip_like.B == 16);

  Certificate tail;
  tail.A = 12;
  tail.B = 10;
  auto composed = compose_affine(affine_witness(1, 5, 1, -5), tail, "g", true);
  CHECK(composed.A == 144);
  CHECK(composed.B == 140);
  CHECK(!composed.theta);
  CHECK(composed.assumptions.size() == 1);

  tail.theta = Rational(1, 5);
  CHECK(compose_affine(affine_witness(1, 5, 1, -5), tail, "g", true).theta == Rational(1, 5));
  CHECK_THROWS_AS(compose_affine(affine_witness(1, 5, 1, -5), tail, "g", false), MissingAssertion);
}

TEST_CASE("sequential linear composition") {
  auto single = compose_linear({{simple_loop_witness(), true, "g"}}, false);
  auto direct = linear_certificate(simple_loop_witness(), "g");
  CHECK(single.A == direct.A);
  CHECK(single.theta == direct.theta);

  auto two = compose_linear({{simple_loop_witness(), true, "g1"}, {simple_loop_witness(), true, "g2"}}, true);
  CHECK(two.kind == CertificateKind::SequentialLinear);
  CHECK(two.A >= direct.A);
  CHECK(two.theta == Rational(1, 2));
  CHECK(*two.D == direct.A);
  CHECK(testsupport::chain_violation(*two.chain, *two.partition, *two.C, *two.D, *two.p) == "");
  CHECK(two.stages.size() == 2);

  CHECK_THROWS_AS(compose_linear({{simple_loop_witness(), false, "g"}}, true), NonLinearWitness);
  CHECK_THROWS_AS(compose_linear({{simple_loop_witness(), true, "g1"}, {simple_loop_witness(), true, "g2"}}, false),
                  MissingAssertion);
}

TEST_CASE("certificate JSON round trip") {
  auto m = testsupport::corpus_model("misc/expansive-drift.pprog");
  auto w = witness({1}, 0, 1, -1);
  w.c = 1;
  w.d = 1;
  w.M = 1;
  for (const auto& cert : {affine_certificate(affine_witness(1, 5, 1, -5), "g"),
                           linear_certificate(simple_loop_witness(), "g"), expansive_certificate(w, m, {Rational(10)})}) {
    auto json = to_json(cert);
    auto back = certificate_from_json(json);
    CHECK(back.kind == cert.kind);
    CHECK(back.A == cert.A);
    CHECK(back.B == cert.B);
    CHECK(back.theta == cert.theta);
    CHECK(back.region == cert.region);
    CHECK(back.witness.eta.coeffs == cert.witness.eta.coeffs);
    CHECK(json.contains("theorem"));
    if (cert.chain) CHECK(back.chain->A == cert.chain->A);
    if (cert.rho) CHECK(*back.rho == *cert.rho);
  }
  CHECK_THROWS(certificate_from_json(nlohmann::json{{"kind", "affine"}}));
}
