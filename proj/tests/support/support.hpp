#pragma once

// Shared helpers for unit and acceptance tests. The oracles here are written
// independently of the library code they check.

#include "psense/cert/certificate.hpp"
#include "psense/dsl/parser.hpp"
#include "psense/lp/constraint_system.hpp"
#include "psense/lp/farkas.hpp"
#include "psense/lp/solver.hpp"
#include "psense/model/loop_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef PSENSE_CORPUS_DIR
#error "PSENSE_CORPUS_DIR must point at the corpus directory"
#endif

namespace testsupport {

using psense::Rational;
using psense::RationalVector;

inline std::string corpus_path(const std::string& name) { return std::string(PSENSE_CORPUS_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline std::vector<psense::model::LoopModel> models_from_text(const std::string& text) {
  return psense::model::extract_models(psense::dsl::parse(text, "<test>"));
}

inline std::vector<psense::model::LoopModel> corpus_models(const std::string& name) {
  return psense::model::extract_models(psense::dsl::parse(read_text(corpus_path(name)), name));
}

inline psense::model::LoopModel corpus_model(const std::string& name) { return corpus_models(name).front(); }

// The 8 programs expected to get affine certificates and the 12 expected to
// get linear ones.
inline const std::vector<std::string>& affine_programs() {
  static const std::vector<std::string> names = {
      "ad-rdwalk-2d",   "american-roulette", "mini-roulette", "prdwalk-variant",
      "prspeed",        "race-variant",      "rdwalk",        "ad-rdwalk-1d-variant",
  };
  return names;
}

inline const std::vector<std::string>& linear_programs() {
  static const std::vector<std::string> names = {
      "ad-rdwalk-2d-variant", "american-roulette-variant", "double-room-heating", "mini-roulette-variant",
      "pollutant-disposal",   "prdwalk",                   "prspeed-variant",     "race",
      "rdwalk-variant",       "simple-while-loop",         "single-room-heating", "ad-rdwalk-1d",
  };
  return names;
}

// splitmix64; small, fast and reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform integer in [lo, hi].
  long integer(long lo, long hi) {
    return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  // Rational num/den with num uniform in [lo*den, hi*den].
  Rational rational(long lo, long hi, long den) { return Rational(integer(lo * den, hi * den), den); }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Every inequality of the coefficient-chain system, substituted exactly:
//   (1 - p) A_inf + C + p A_{k-1} <= A_k for 1 <= k <= n
//   D = A_0 <= A_1 <= ... <= A_n <= A_inf
// Returns an empty string when all hold, otherwise the first violation.
inline std::string chain_violation(const psense::cert::CoefficientChain& chain, unsigned long n, const Rational& C,
                                   const Rational& D, const Rational& p) {
  const auto& A = chain.A;
  if (A.size() != n + 1) return "chain has " + std::to_string(A.size()) + " entries, expected " + std::to_string(n + 1);
  if (A[0] != D) return "A_0 != D";
  for (unsigned long k = 1; k <= n; ++k) {
    if ((1 - p) * chain.A_inf + C + p * A[k - 1] > A[k]) return "step inequality fails at k = " + std::to_string(k);
    if (A[k - 1] > A[k]) return "not monotone at k = " + std::to_string(k);
  }
  if (A[n] > chain.A_inf) return "A_n > A_inf";
  return "";
}

// The chain obtained by turning every step inequality into an equality and
// iterating it from A_0 = D, with A_inf from the explicit power sum.
inline psense::cert::CoefficientChain iterate_chain(unsigned long n, const Rational& C, const Rational& D,
                                                    const Rational& p) {
  Rational power_sum = 0;
  Rational power = 1;
  for (unsigned long m = 1; m <= n + 1; ++m) {
    power_sum += power;
    power *= p;
  }
  psense::cert::CoefficientChain chain;
  chain.A_inf = power_sum * C / power + D;
  chain.A.push_back(D);
  for (unsigned long k = 1; k <= n; ++k) chain.A.push_back((1 - p) * chain.A_inf + C + p * chain.A.back());
  return chain;
}

// A random bounded polyhedron in `dim` dimensions inside the box [-10, 10]^dim,
// guaranteed to contain a known interior point.
struct RandomInstance {
  psense::lp::LinearConstraintSystem polyhedron;
  RationalVector c;
  Rational d;
};

inline psense::lp::LinearConstraintSystem random_polyhedron(Rng& rng, std::size_t dim) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < dim; ++i) names.push_back("x" + std::to_string(i));
  psense::lp::LinearConstraintSystem poly(names);
  for (std::size_t i = 0; i < dim; ++i) {
    RationalVector up(dim, Rational(0)), down(dim, Rational(0));
    up[i] = 1;
    down[i] = -1;
    poly.add_dense(up, 10);
    poly.add_dense(down, 10);
  }
  RationalVector inside;
  for (std::size_t i = 0; i < dim; ++i) inside.push_back(rng.rational(-8, 8, 4));
  long extra = rng.integer(1, 3);
  for (long r = 0; r < extra; ++r) {
    RationalVector a;
    for (std::size_t i = 0; i < dim; ++i) a.push_back(Rational(rng.integer(-5, 5)));
    Rational at = 0;
    for (std::size_t i = 0; i < dim; ++i) at += a[i] * inside[i];
    poly.add_dense(a, at + rng.rational(0, 6, 2));
  }
  return poly;
}

// Grid points over [-10, 10]^dim with `per_axis` points per axis, as doubles.
inline std::vector<std::vector<double>> grid_points(std::size_t dim, int per_axis) {
  std::vector<std::vector<double>> points;
  std::vector<int> idx(dim, 0);
  while (true) {
    std::vector<double> p;
    for (std::size_t i = 0; i < dim; ++i) p.push_back(-10.0 + 20.0 * idx[i] / (per_axis - 1));
    points.push_back(std::move(p));
    std::size_t k = 0;
    while (k < dim && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == dim) break;
  }
  return points;
}

// Rows of a polyhedron converted to doubles once, for grid scans.
struct DoubleRows {
  std::vector<std::vector<double>> a;
  std::vector<double> b;

  explicit DoubleRows(const psense::lp::LinearConstraintSystem& poly) {
    for (const auto& row : poly.constraints()) {
      std::vector<double> coeffs(poly.variable_count(), 0.0);
      for (const auto& t : row.terms) coeffs[t.var] += psense::to_double(t.coeff);
      a.push_back(std::move(coeffs));
      b.push_back(psense::to_double(row.bound));
    }
  }

  // Strictly inside every row by more than `slack`.
  bool inside(const std::vector<double>& x, double slack = 1e-9) const {
    for (std::size_t r = 0; r < a.size(); ++r) {
      double s = 0;
      for (std::size_t i = 0; i < x.size(); ++i) s += a[r][i] * x[i];
      if (s > b[r] - slack) return false;
    }
    return true;
  }
};

inline double dot(const RationalVector& c, const std::vector<double>& x) {
  double s = 0;
  for (std::size_t i = 0; i < c.size(); ++i) s += psense::to_double(c[i]) * x[i];
  return s;
}

// A random polyhedron with a halfspace whose offset sits near the grid
// maximum of c.x over the polyhedron, so both verdicts occur often.
inline RandomInstance random_instance(Rng& rng, std::size_t dim, const std::vector<std::vector<double>>& grid) {
  RandomInstance out;
  out.polyhedron = random_polyhedron(rng, dim);
  for (std::size_t i = 0; i < dim; ++i) out.c.push_back(Rational(rng.integer(-4, 4)));
  DoubleRows rows(out.polyhedron);
  double best = -1e300;
  for (const auto& x : grid)
    if (rows.inside(x)) best = std::max(best, dot(out.c, x));
  if (best < -1e299) best = 0;
  out.d = Rational(static_cast<long>(std::floor(best * 4)), 4) + rng.rational(-1, 2, 4);
  return out;
}

// Feasibility of the Farkas multiplier system for P inside {c.x <= d}, with
// c and d passed as template parameters pinned by equality rows.
inline bool farkas_feasible(const RandomInstance& instance) {
  std::size_t dim = instance.c.size();
  psense::lp::TemplateHalfspace half;
  std::vector<std::string> params;
  for (std::size_t i = 0; i < dim; ++i) {
    half.coeffs.push_back(psense::lp::ParamExpr::of_parameter(i));
    params.push_back("c" + std::to_string(i));
  }
  half.bound = psense::lp::ParamExpr::of_parameter(dim);
  params.push_back("d");
  auto system = psense::lp::encode_inclusion_template(instance.polyhedron, half, params);
  for (std::size_t i = 0; i < dim; ++i) system.add_equal({{i, 1}}, instance.c[i]);
  system.add_equal({{dim, 1}}, instance.d);
  return psense::lp::polyhedron_nonempty(system);
}

// Whether some grid point strictly inside P strictly violates c.x <= d.
inline bool grid_counterexample(const RandomInstance& instance, const std::vector<std::vector<double>>& grid) {
  DoubleRows rows(instance.polyhedron);
  std::vector<double> c;
  for (const auto& v : instance.c) c.push_back(psense::to_double(v));
  double d = psense::to_double(instance.d);
  for (const auto& x : grid) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += c[i] * x[i];
    if (s > d + 1e-9 && rows.inside(x)) return true;
  }
  return false;
}

}  // namespace testsupport
