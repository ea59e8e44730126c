#include "psense/rsm/witness.hpp"

#include <cmath>

namespace psense::rsm {

Rational LinearFunction::evaluate(const RationalVector& v) const {
  Rational value = offset;
  for (std::size_t i = 0; i < coeffs.size(); ++i) value += coeffs[i] * v[i];
  return value;
}

std::string LinearFunction::describe(const std::vector<std::string>& variables, int digits) const {
  std::string out;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] == 0) continue;
    Rational mag = coeffs[i] < 0 ? Rational(-coeffs[i]) : coeffs[i];
    if (out.empty()) out += coeffs[i] < 0 ? "-" : "";
    else out += coeffs[i] < 0 ? " - " : " + ";
    if (mag != 1) out += to_decimal(mag, digits) + "*";
    out += i < variables.size() ? variables[i] : "v" + std::to_string(i);
  }
  if (offset != 0 || out.empty()) {
    Rational mag = offset < 0 ? Rational(-offset) : offset;
    if (out.empty()) out = (offset < 0 ? "-" : "") + to_decimal(mag, digits);
    else out += (offset < 0 ? " - " : " + ") + to_decimal(mag, digits);
  }
  return out;
}

Metric Metric::max_norm() { return Metric{}; }

Metric Metric::euclidean(std::size_t dimension) {
  Metric m;
  m.kind = MetricKind::Euclid;
  m.D1 = 1;
  m.D2 = sqrt_upper(Rational(static_cast<long>(dimension == 0 ? 1 : dimension)));
  return m;
}

double Metric::distance(const std::vector<double>& a, const std::vector<double>& b) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double diff = std::fabs(a[i] - b[i]);
    if (kind == MetricKind::Max) acc = std::max(acc, diff);
    else acc += diff * diff;
  }
  return kind == MetricKind::Max ? acc : std::sqrt(acc);
}

namespace {

nlohmann::json optional_json(const std::optional<Rational>& value) {
  if (!value) return nullptr;
  return to_string(*value);
}

std::optional<Rational> optional_from(const nlohmann::json& json, const char* key) {
  if (!json.contains(key) || json[key].is_null()) return std::nullopt;
  return parse_rational(json[key].get<std::string>());
}

}  // namespace

nlohmann::json to_json(const Metric& metric) {
  return {{"kind", metric.name()}, {"D1", to_string(metric.D1)}, {"D2", to_string(metric.D2)}};
}

Metric metric_from_json(const nlohmann::json& json) {
  Metric m;
  m.kind = json.at("kind").get<std::string>() == "euclid" ? MetricKind::Euclid : MetricKind::Max;
  m.D1 = parse_rational(json.at("D1").get<std::string>());
  m.D2 = parse_rational(json.at("D2").get<std::string>());
  return m;
}

nlohmann::json to_json(const RsmWitness& witness) {
  nlohmann::json coeffs = nlohmann::json::object();
  for (std::size_t i = 0; i < witness.eta.coeffs.size(); ++i)
    coeffs[witness.variables.at(i)] = to_string(witness.eta.coeffs[i]);
  return {{"eta", {{"coeffs", coeffs}, {"offset", to_string(witness.eta.offset)}}},
          {"variables", witness.variables},
          {"eta_text", witness.eta.describe(witness.variables)},
          {"epsilon", to_string(witness.epsilon)},
          {"K", to_string(witness.K)},
          {"c", optional_json(witness.c)},
          {"d", optional_json(witness.d)},
          {"M", optional_json(witness.M)},
          {"L", optional_json(witness.L)},
          {"Lprime", optional_json(witness.Lprime)},
          {"metric", to_json(witness.metric)},
          {"numeric", witness.numeric}};
}

RsmWitness witness_from_json(const nlohmann::json& json) {
  RsmWitness w;
  w.variables = json.at("variables").get<std::vector<std::string>>();
  const auto& coeffs = json.at("eta").at("coeffs");
  for (const auto& name : w.variables) w.eta.coeffs.push_back(parse_rational(coeffs.at(name).get<std::string>()));
  w.eta.offset = parse_rational(json.at("eta").at("offset").get<std::string>());
  w.epsilon = parse_rational(json.at("epsilon").get<std::string>());
  w.K = parse_rational(json.at("K").get<std::string>());
  w.c = optional_from(json, "c");
  w.d = optional_from(json, "d");
  w.M = optional_from(json, "M");
  w.L = optional_from(json, "L");
  w.Lprime = optional_from(json, "Lprime");
  w.metric = metric_from_json(json.at("metric"));
  w.numeric = json.value("numeric", false);
  return w;
}

}  // namespace psense::rsm
