#include "psense/cert/certificate.hpp"

#include "psense/cert/interval.hpp"

#include <algorithm>

namespace psense::cert {

namespace {

constexpr unsigned kExpBits = 128;

const char* theorem_id(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::Affine: return "affine-rsm";
    case CertificateKind::Linear: return "linear-partition";
    case CertificateKind::Expansive: return "expansive-concentration";
    case CertificateKind::SequentialAffine: return "sequential-affine";
    case CertificateKind::SequentialLinear: return "sequential-linear";
  }
  return "";
}

const Rational& require(const std::optional<Rational>& value, const char* name, const std::string& context) {
  if (!value) throw MissingSideCondition(name, context);
  return *value;
}

void require_non_expansive(const rsm::RsmWitness& w, const std::string& context) {
  const Rational& L = require(w.L, "L", context);
  if (L > 1)
    throw NotNonExpansive(context + ": loop body is expansive (L = " + to_decimal(L) +
                          " > 1); try --kind expansive");
}

const Rational& require_bounded_update(const rsm::RsmWitness& w, const std::string& context) {
  if (!w.d) throw NoBoundedUpdate(context + ": no bounded-update constant d");
  return *w.d;
}

// Geometric sum 1 + p + ... + p^(k-1).
Rational geometric_sum(const Rational& p, unsigned long k) {
  Rational sum = 0;
  Rational term = 1;
  for (unsigned long m = 0; m < k; ++m) {
    sum += term;
    term *= p;
  }
  return sum;
}

struct ChainInputs {
  Rational p;
  unsigned long partition = 0;
  Rational C;
  Rational Cprime;
  Rational D;
  CoefficientChain chain;
};

ChainInputs chain_for(const rsm::RsmWitness& w, const Rational& Cprime, const Rational& D) {
  const Rational& c = *w.c;
  ChainInputs in;
  in.p = minimal_decrease_probability(w.epsilon, c);
  in.partition = partition_size(w.epsilon, c);
  in.Cprime = Cprime;
  in.C = std::max(*w.Lprime * Cprime, D);
  in.D = D;
  in.chain = solve_coefficient_chain(in.partition, in.C, in.D, in.p);
  return in;
}

void check_linear_prerequisites(const rsm::RsmWitness& w, const std::string& context) {
  require_non_expansive(w, context);
  require(w.d, "d", context);
  require(w.c, "c", context);
  require(w.Lprime, "L'", context);
  const Rational& M = require(w.M, "M", context);
  if (M <= 0) throw BadParameters(context + ": RSM-continuity constant M must be positive");
}

void fill_chain(Certificate& cert, const ChainInputs& in) {
  cert.chain = in.chain;
  cert.p = in.p;
  cert.partition = in.partition;
  cert.C = in.C;
  cert.Cprime = in.Cprime;
  cert.D = in.D;
  cert.A = in.chain.A_inf;
  cert.B = 0;
}

nlohmann::json rational_json(const Rational& value) { return psense::to_string(value); }

Rational rational_from(const nlohmann::json& json) { return parse_rational(json.get<std::string>()); }

}  // namespace

MissingSideCondition::MissingSideCondition(std::string name, const std::string& context)
    : CertificateError(context + ": missing side condition " + name), name_(std::move(name)) {}

std::string to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::Affine: return "affine";
    case CertificateKind::Linear: return "linear";
    case CertificateKind::Expansive: return "expansive";
    case CertificateKind::SequentialAffine: return "sequential-affine";
    case CertificateKind::SequentialLinear: return "sequential-linear";
  }
  return "";
}

CertificateKind kind_from_string(const std::string& text) {
  for (auto kind : {CertificateKind::Affine, CertificateKind::Linear, CertificateKind::Expansive,
                    CertificateKind::SequentialAffine, CertificateKind::SequentialLinear})
    if (to_string(kind) == text) return kind;
  throw std::invalid_argument("unknown certificate kind '" + text + "'");
}

Rational termination_bound(const rsm::RsmWitness& witness, const model::LoopModel& model, const RationalVector& v) {
  if (v.size() != model.dimension()) throw std::invalid_argument("valuation dimension does not match the loop");
  if (!model.guard.contains(v)) throw OutsideGuard("valuation does not satisfy the loop guard '" + model.guard_text + "'");
  return (witness.eta.evaluate(v) - witness.K) / witness.epsilon;
}

Rational minimal_decrease_probability(const Rational& epsilon, const Rational& c) {
  if (epsilon <= 0 || epsilon > c)
    throw BadParameters("need 0 < epsilon <= c, got epsilon = " + to_decimal(epsilon) + ", c = " + to_decimal(c));
  return epsilon / (2 * c - epsilon);
}

unsigned long partition_size(const Rational& epsilon, const Rational& c) {
  if (epsilon <= 0 || epsilon > c)
    throw BadParameters("need 0 < epsilon <= c, got epsilon = " + to_decimal(epsilon) + ", c = " + to_decimal(c));
  Integer n = floor_int(2 * (c + 1) / epsilon) + 1;
  return n.convert_to<unsigned long>();
}

CoefficientChain solve_coefficient_chain(unsigned long n, const Rational& C, const Rational& D, const Rational& p) {
  if (n < 1) throw BadParameters("coefficient chain needs n >= 1");
  if (C < 0 || D < 0) throw BadParameters("coefficient chain needs C, D >= 0");
  if (p <= 0 || p > 1) throw BadParameters("coefficient chain needs p in (0, 1]");
  // Geometric sums keep p = 1 finite: S(k) = k there.
  Rational head = geometric_sum(p, n + 1) / pow(p, n + 1);
  CoefficientChain out;
  out.A_inf = head * C + D;
  out.A.reserve(n + 1);
  out.A.push_back(D);
  Rational p_power = 1;
  for (unsigned long k = 1; k <= n; ++k) {
    p_power *= p;
    out.A.push_back(((1 - p_power) * head + geometric_sum(p, k)) * C + D);
  }
  return out;
}

Certificate affine_certificate(const rsm::RsmWitness& w, const std::string& region) {
  const std::string context = "affine certificate";
  require_non_expansive(w, context);
  const Rational& d = require_bounded_update(w, context);
  const Rational& M = require(w.M, "M", context);
  Certificate cert;
  cert.kind = CertificateKind::Affine;
  cert.theorem = theorem_id(cert.kind);
  const Rational& D1 = w.metric.D1;
  cert.A = 2 * (d * M + w.epsilon) / (w.epsilon * D1);
  cert.B = -2 * d * w.K / (w.epsilon * D1);
  cert.region = region;
  cert.witness = w;
  return cert;
}

Certificate linear_certificate(const rsm::RsmWitness& w, const std::string& region) {
  const std::string context = "linear certificate";
  check_linear_prerequisites(w, context);
  const Rational& d = *w.d;
  const Rational& M = *w.M;
  const Rational& D1 = w.metric.D1;
  Rational Cprime = ((d * M + w.epsilon) / (D1 * w.epsilon)) / M - d * w.K / (D1 * w.epsilon);
  ChainInputs in = chain_for(w, Cprime, 1 / D1);
  Certificate cert;
  cert.kind = CertificateKind::Linear;
  cert.theorem = theorem_id(cert.kind);
  fill_chain(cert, in);
  cert.theta = 1 / M;
  cert.region = region;
  cert.witness = w;
  return cert;
}

Certificate expansive_certificate(const rsm::RsmWitness& w, const model::LoopModel& model,
                                  const RationalVector& center) {
  const std::string context = "expansive certificate";
  const Rational& L = require(w.L, "L", context);
  const Rational& c = require(w.c, "c", context);
  const Rational& d = require_bounded_update(w, context);
  const Rational& M = require(w.M, "M", context);
  if (M <= 0) throw BadParameters(context + ": RSM-continuity constant M must be positive");
  if (center.size() != model.dimension())
    throw CenterInfeasible("center has " + std::to_string(center.size()) + " coordinates, the loop has " +
                           std::to_string(model.dimension()));
  if (!model.guard.contains(center))
    throw CenterInfeasible("center does not satisfy the loop guard '" + model.guard_text + "'");
  Rational eta_center = w.eta.evaluate(center);
  if (eta_center <= 0) throw CenterInfeasible("eta(center) = " + to_decimal(eta_center) + " is not positive");

  const Rational& eps = w.epsilon;
  Interval decay = exp_interval(-3 * eps * eps / (8 * c * c), kExpBits);
  Rational q = L * decay.hi;
  if (q >= 1)
    throw ExpansionTooFast("L = " + to_decimal(L) + " is not below exp(3 eps^2 / 8 c^2) >= " +
                           to_decimal(1 / decay.hi, 8) + " (c = " + to_decimal(c) + ")");
  const Rational& s = decay.hi;
  Rational tail = exp_interval(-eps * eta_center / (8 * c * c), kExpBits).hi;
  unsigned long N = (floor_int(4 * eta_center / eps) + 1).convert_to<unsigned long>();
  const Rational& D1 = w.metric.D1;
  Rational Aprime = (d * M + eps) / (D1 * eps);
  Rational Bprime = -d * w.K / (D1 * eps);
  Rational LN = pow_upper(L, N, kExpBits);

  Certificate cert;
  cert.kind = CertificateKind::Expansive;
  cert.theorem = theorem_id(cert.kind);
  cert.A = round_up(2 * Aprime * LN + 2 * Aprime * LN * tail * q / (1 - q), kExpBits);
  cert.B = round_up(2 * Bprime + 2 * Bprime * tail * s / (1 - s), kExpBits);
  cert.rho = eta_center / (2 * M);
  cert.N = N;
  cert.center = center;
  cert.q = q;
  std::string point;
  for (std::size_t i = 0; i < center.size(); ++i)
    point += (i ? ", " : "") + model.program_variables[i] + " = " + to_decimal(center[i]);
  cert.region = "guard states within distance " + to_decimal(*cert.rho) + " of (" + point + ")";
  cert.witness = w;
  return cert;
}

Certificate compose_affine(const rsm::RsmWitness& head, const Certificate& tail, const std::string& region,
                           bool range_asserted) {
  const std::string context = "sequential affine certificate";
  require_non_expansive(head, context);
  const Rational& d = require_bounded_update(head, context);
  const Rational& M = require(head.M, "M", context);
  if (!range_asserted)
    throw MissingAssertion(context + ": the output range of the first loop must be asserted to lie in the "
                           "region of the rest (--assert-range)");
  Certificate cert;
  cert.kind = CertificateKind::SequentialAffine;
  cert.theorem = theorem_id(cert.kind);
  cert.A = 2 * tail.A * (1 + d * M / head.epsilon);
  cert.B = 2 * (-tail.A * d * head.K / head.epsilon + tail.B);
  cert.theta = tail.theta;
  cert.region = region;
  cert.assumptions = tail.assumptions;
  cert.assumptions.push_back("outputs of the first loop lie in the region of the remaining program (user assertion)");
  cert.witness = head;
  cert.stages.push_back(head);
  if (tail.stages.empty()) cert.stages.push_back(tail.witness);
  else cert.stages.insert(cert.stages.end(), tail.stages.begin(), tail.stages.end());
  return cert;
}

Certificate compose_linear(const std::vector<LinearStage>& stages, bool range_asserted) {
  if (stages.empty()) throw BadParameters("sequential linear certificate needs at least one loop");
  for (std::size_t i = 0; i < stages.size(); ++i)
    if (!stages[i].linear)
      throw NonLinearWitness("loop " + std::to_string(i + 1) + " has no linear RSM-map");
  Certificate tail = linear_certificate(stages.back().witness, stages.back().region);
  if (stages.size() == 1) return tail;
  if (!range_asserted)
    throw MissingAssertion("sequential linear certificate: the output range of each loop must be asserted to lie "
                           "in the guard of the next (--assert-range)");

  Rational A_next = tail.A;
  Rational theta_next = *tail.theta;
  ChainInputs head_inputs;
  for (std::size_t i = stages.size() - 1; i-- > 0;) {
    const rsm::RsmWitness& w = stages[i].witness;
    std::string context = "sequential linear certificate, loop " + std::to_string(i + 1);
    check_linear_prerequisites(w, context);
    Rational theta = std::min(1 / *w.M, theta_next);
    Rational Cprime = A_next * theta + A_next * *w.d * (*w.M * theta - w.K) / w.epsilon;
    head_inputs = chain_for(w, Cprime, A_next);
    A_next = head_inputs.chain.A_inf;
    theta_next = theta;
  }

  Certificate cert;
  cert.kind = CertificateKind::SequentialLinear;
  cert.theorem = theorem_id(cert.kind);
  fill_chain(cert, head_inputs);
  cert.theta = theta_next;
  cert.region = stages.front().region;
  for (std::size_t i = 0; i + 1 < stages.size(); ++i)
    cert.assumptions.push_back("outputs of loop " + std::to_string(i + 1) + " satisfy the guard of loop " +
                               std::to_string(i + 2) + " (user assertion)");
  cert.witness = stages.front().witness;
  for (const auto& s : stages) cert.stages.push_back(s.witness);
  return cert;
}

nlohmann::json to_json(const Certificate& cert) {
  nlohmann::json out;
  out["kind"] = to_string(cert.kind);
  out["theorem"] = cert.theorem;
  out["A"] = rational_json(cert.A);
  out["B"] = rational_json(cert.B);
  out["A_decimal"] = to_decimal(cert.A);
  out["B_decimal"] = to_decimal(cert.B);
  out["theta"] = cert.theta ? rational_json(*cert.theta) : nlohmann::json("inf");
  if (cert.chain) {
    nlohmann::json chain = nlohmann::json::array();
    for (const auto& a : cert.chain->A) chain.push_back(rational_json(a));
    out["chain"] = chain;
    out["A_inf"] = rational_json(cert.chain->A_inf);
  }
  if (cert.p) out["p"] = rational_json(*cert.p);
  if (cert.partition) out["n_star"] = *cert.partition;
  if (cert.C) out["C"] = rational_json(*cert.C);
  if (cert.Cprime) out["C_prime"] = rational_json(*cert.Cprime);
  if (cert.D) out["D"] = rational_json(*cert.D);
  if (cert.rho) out["rho"] = rational_json(*cert.rho);
  if (cert.N) out["N"] = *cert.N;
  if (cert.q) out["q"] = rational_json(*cert.q);
  if (cert.center) {
    nlohmann::json center = nlohmann::json::array();
    for (const auto& x : *cert.center) center.push_back(rational_json(x));
    out["center"] = center;
  }
  out["region"] = cert.region;
  out["assumptions"] = cert.assumptions;
  out["witness"] = rsm::to_json(cert.witness);
  if (!cert.stages.empty()) {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : cert.stages) stages.push_back(rsm::to_json(s));
    out["stages"] = stages;
  }
  out["program_hash"] = cert.program_hash;
  return out;
}

Certificate certificate_from_json(const nlohmann::json& json) {
  Certificate cert;
  cert.kind = kind_from_string(json.at("kind").get<std::string>());
  cert.theorem = json.at("theorem").get<std::string>();
  cert.A = rational_from(json.at("A"));
  cert.B = rational_from(json.at("B"));
  if (json.at("theta").get<std::string>() != "inf") cert.theta = rational_from(json.at("theta"));
  if (json.contains("chain")) {
    CoefficientChain chain;
    for (const auto& a : json.at("chain")) chain.A.push_back(rational_from(a));
    chain.A_inf = rational_from(json.at("A_inf"));
    cert.chain = chain;
  }
  if (json.contains("p")) cert.p = rational_from(json.at("p"));
  if (json.contains("n_star")) cert.partition = json.at("n_star").get<unsigned long>();
  if (json.contains("C")) cert.C = rational_from(json.at("C"));
  if (json.contains("C_prime")) cert.Cprime = rational_from(json.at("C_prime"));
  if (json.contains("D")) cert.D = rational_from(json.at("D"));
  if (json.contains("rho")) cert.rho = rational_from(json.at("rho"));
  if (json.contains("N")) cert.N = json.at("N").get<unsigned long>();
  if (json.contains("q")) cert.q = rational_from(json.at("q"));
  if (json.contains("center")) {
    RationalVector center;
    for (const auto& x : json.at("center")) center.push_back(rational_from(x));
    cert.center = center;
  }
  cert.region = json.value("region", "");
  cert.assumptions = json.value("assumptions", std::vector<std::string>{});
  cert.witness = rsm::witness_from_json(json.at("witness"));
  if (json.contains("stages"))
    for (const auto& s : json.at("stages")) cert.stages.push_back(rsm::witness_from_json(s));
  cert.program_hash = json.value("program_hash", "");
  return cert;
}

}  // namespace psense::cert
