#pragma once

#include "psense/model/loop_model.hpp"
#include "psense/rsm/witness.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace psense::cert {

enum class CertificateKind { Affine, Linear, Expansive, SequentialAffine, SequentialLinear };

std::string to_string(CertificateKind kind);
CertificateKind kind_from_string(const std::string& text);

class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotNonExpansive : public CertificateError {
 public:
  using CertificateError::CertificateError;
};

class NoBoundedUpdate : public CertificateError {
 public:
  using CertificateError::CertificateError;
};

class OutsideGuard : public CertificateError {
 public:
  using CertificateError::CertificateError;
};

class BadParameters : public CertificateError {
 public:
  using CertificateError::CertificateError;
};

// Names the missing constant: "c", "L'", "d", ...
class MissingSideCondition : public CertificateError {
 public:
  MissingSideCondition(std::string name, const std::string& context);
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class ExpansionTooFast : public CertificateError {
 public:
  using CertificateError::CertificateError;
};

class CenterInfeasible : public CertificateError {
 public:
  using CertificateError::CertificateError;
};

class NonLinearWitness : public CertificateError {
 public:
  using CertificateError::CertificateError;
};

class MissingAssertion : public CertificateError {
 public:
  using CertificateError::CertificateError;
};

// A_0 = D <= A_1 <= ... <= A_n <= A_inf.
struct CoefficientChain {
  RationalVector A;
  Rational A_inf;
};

// |E_v(Z) - E_v'(Z')| <= A d(v, v') + B whenever d(v, v') <= theta and
// v, v' lie in the region.
struct Certificate {
  CertificateKind kind = CertificateKind::Affine;
  std::string theorem;
  Rational A;
  Rational B;
  std::optional<Rational> theta;  // std::nullopt: no threshold

  // Linear certificates.
  std::optional<CoefficientChain> chain;
  std::optional<Rational> p;
  std::optional<unsigned long> partition;
  std::optional<Rational> C;
  std::optional<Rational> Cprime;
  std::optional<Rational> D;

  // Expansive certificates.
  std::optional<Rational> rho;
  std::optional<unsigned long> N;
  std::optional<RationalVector> center;
  std::optional<Rational> q;  // upper bound of L exp(-3 eps^2 / 8 c^2)

  std::string region;
  std::vector<std::string> assumptions;
  rsm::RsmWitness witness;
  std::vector<rsm::RsmWitness> stages;  // sequential: one per loop, head first
  std::string program_hash;
};

// (eta(v) - K) / epsilon, an upper bound on the expected iteration count.
Rational termination_bound(const rsm::RsmWitness& witness, const model::LoopModel& model, const RationalVector& v);

// p = eps / (2c - eps).
Rational minimal_decrease_probability(const Rational& epsilon, const Rational& c);

// Smallest n with (n - 1) eps / 2 <= c + 1 < n eps / 2.
unsigned long partition_size(const Rational& epsilon, const Rational& c);

// Closed-form solution of
//   (1 - p) A_inf + C + p A_{k-1} <= A_k   (1 <= k <= n)
//   D = A_0 <= A_1 <= ... <= A_n <= A_inf
CoefficientChain solve_coefficient_chain(unsigned long n, const Rational& C, const Rational& D, const Rational& p);

Certificate affine_certificate(const rsm::RsmWitness& witness, const std::string& region);

Certificate linear_certificate(const rsm::RsmWitness& witness, const std::string& region);

Certificate expansive_certificate(const rsm::RsmWitness& witness, const model::LoopModel& model,
                                  const RationalVector& center);

// Head loop Q (witness) followed by a program with certificate `tail`.
Certificate compose_affine(const rsm::RsmWitness& head, const Certificate& tail, const std::string& region,
                           bool range_asserted);

struct LinearStage {
  rsm::RsmWitness witness;
  bool linear = true;  // eta is affine in the program variables
  std::string region;
};

// Folds right to left; stages are in program order.
Certificate compose_linear(const std::vector<LinearStage>& stages, bool range_asserted);

nlohmann::json to_json(const Certificate& certificate);
Certificate certificate_from_json(const nlohmann::json& json);

}  // namespace psense::cert
