#pragma once

#include "psense/rational.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace psense::rsm {

// coeffs . v + offset over the program variables.
struct LinearFunction {
  RationalVector coeffs;
  Rational offset;

  Rational evaluate(const RationalVector& v) const;
  std::string describe(const std::vector<std::string>& variables, int digits = 6) const;
};

enum class MetricKind { Max, Euclid };

// Metric on states with D1 * |v - v'|_inf <= d(v, v') <= D2 * |v - v'|_inf.
struct Metric {
  MetricKind kind = MetricKind::Max;
  Rational D1 = 1;
  Rational D2 = 1;

  static Metric max_norm();
  // D2 is a rational upper bound of sqrt(dimension).
  static Metric euclidean(std::size_t dimension);

  std::string name() const { return kind == MetricKind::Max ? "max" : "euclid"; }
  double distance(const std::vector<double>& a, const std::vector<double>& b) const;
};

struct RsmWitness {
  std::vector<std::string> variables;
  LinearFunction eta;
  Rational epsilon = 1;
  Rational K;
  std::optional<Rational> c;       // difference bound
  std::optional<Rational> d;       // bounded update
  std::optional<Rational> M;       // Lipschitz constant of eta
  std::optional<Rational> L;       // Lipschitz constant of the body
  std::optional<Rational> Lprime;  // next-step termination constant
  Metric metric;
  bool numeric = false;            // found with the floating-point LP
};

nlohmann::json to_json(const Metric& metric);
nlohmann::json to_json(const RsmWitness& witness);
Metric metric_from_json(const nlohmann::json& json);
RsmWitness witness_from_json(const nlohmann::json& json);

}  // namespace psense::rsm
