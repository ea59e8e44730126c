#include "psense/report/analysis.hpp"

#include "psense/dsl/parser.hpp"
#include "psense/dsl/printer.hpp"
#include "psense/rsm/synthesis.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

namespace psense::report {

namespace {

class ScopedTimer {
 public:
  explicit ScopedTimer(double& sink) : sink_(sink), start_(std::chrono::steady_clock::now()) {}
  ~ScopedTimer() {
    sink_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;

 private:
  double& sink_;
  std::chrono::steady_clock::time_point start_;
};

// A named prerequisite that does not hold.
class PrerequisiteFailure : public std::runtime_error {
 public:
  PrerequisiteFailure(std::string prerequisite, const std::string& message)
      : std::runtime_error(message), prerequisite_(std::move(prerequisite)) {}
  const std::string& prerequisite() const { return prerequisite_; }

 private:
  std::string prerequisite_;
};

const char* kNonExpansive = "L <= 1";

rsm::Metric make_metric(rsm::MetricKind kind, std::size_t dimension) {
  return kind == rsm::MetricKind::Max ? rsm::Metric::max_norm() : rsm::Metric::euclidean(dimension);
}

std::string loop_label(const model::LoopModel& model) { return "loop " + std::to_string(model.loop_index + 1); }

std::string region_of(const model::LoopModel& model) {
  return "states satisfying the guard of " + loop_label(model) + " (" + model.guard_text + ")";
}

LoopAnalysis analyze_loop(const model::LoopModel& model, rsm::SynthesisMode mode, const AnalysisOptions& options,
                          StageTimings& timings) {
  LoopAnalysis out{model, std::nullopt, std::nullopt, std::nullopt, {}};
  const std::string label = loop_label(model);
  rsm::Metric metric = make_metric(options.metric, model.dimension());
  rsm::RsmWitness w;
  {
    ScopedTimer timer(timings.lp);
    try {
      w = rsm::synthesize(model, rsm::SynthesisOptions{mode, 1, metric, options.lp});
    } catch (const rsm::EmptyGuard& e) {
      throw PrerequisiteFailure("RSM-map", label + ": " + e.what());
    } catch (const rsm::Infeasible& e) {
      if (mode == rsm::SynthesisMode::DifferenceBounded)
        throw PrerequisiteFailure("c", label + ": no difference-bounded linear RSM-map: " + e.what());
      throw PrerequisiteFailure("RSM-map", label + ": no linear RSM-map: " + e.what());
    }
    try {
      w.d = rsm::compute_bounded_update(model, metric, options.lp);
    } catch (const rsm::Unbounded& e) {
      out.notes.push_back(std::string("bounded update: ") + e.what());
    }
    w.M = rsm::compute_lipschitz_eta(w.eta, metric);
    w.L = rsm::compute_body_lipschitz(model, metric);
    if (mode == rsm::SynthesisMode::DifferenceBounded) {
      out.next_step = rsm::check_next_step_lipschitz(model, metric, options.lp);
      if (out.next_step->holds) w.Lprime = out.next_step->constant;
    }
  }
  {
    ScopedTimer timer(timings.verify);
    Rational tolerance = options.lp.mode == lp::LpMode::Exact ? Rational(0) : Rational(1, 1000000);
    out.verification = rsm::verify_witness(model, w, tolerance, options.lp);
  }
  out.witness = w;
  if (!out.verification->passed()) {
    std::string failed;
    for (const auto& c : out.verification->conditions)
      if (!c.passed(out.verification->tolerance)) failed += (failed.empty() ? "" : ", ") + c.name;
    throw PrerequisiteFailure("verification", label + ": synthesized witness fails " + failed);
  }
  return out;
}

std::vector<LoopAnalysis> analyze_loops(const std::vector<model::LoopModel>& models, rsm::SynthesisMode mode,
                                        const AnalysisOptions& options, StageTimings& timings) {
  std::vector<LoopAnalysis> loops;
  for (const auto& m : models) loops.push_back(analyze_loop(m, mode, options, timings));
  return loops;
}

void require_non_expansive(const std::vector<LoopAnalysis>& loops) {
  for (const auto& loop : loops)
    if (*loop.witness->L > 1)
      throw PrerequisiteFailure(kNonExpansive, loop_label(loop.model) + ": loop body is expansive (L = " +
                                                   to_decimal(*loop.witness->L) + ")");
}

cert::Certificate certify_affine(const std::vector<LoopAnalysis>& loops, const AnalysisOptions& options,
                                 StageTimings& timings) {
  require_non_expansive(loops);
  for (const auto& loop : loops)
    if (!loop.witness->d)
      throw PrerequisiteFailure("d", loop_label(loop.model) + ": no bounded-update constant");
  ScopedTimer timer(timings.certify);
  const auto& last = loops.back();
  cert::Certificate cert = cert::affine_certificate(*last.witness, region_of(last.model));
  for (std::size_t i = loops.size() - 1; i-- > 0;)
    cert = cert::compose_affine(*loops[i].witness, cert, region_of(loops[i].model), options.assert_range);
  return cert;
}

cert::Certificate certify_linear(const std::vector<LoopAnalysis>& loops, const AnalysisOptions& options,
                                 StageTimings& timings) {
  require_non_expansive(loops);
  for (const auto& loop : loops) {
    if (!loop.witness->d)
      throw PrerequisiteFailure("d", loop_label(loop.model) + ": no bounded-update constant");
    if (!loop.next_step || !loop.next_step->holds) {
      std::string why;
      if (loop.next_step)
        for (const auto& r : loop.next_step->reasons) why += (why.empty() ? "" : "; ") + r;
      throw PrerequisiteFailure("B4", loop_label(loop.model) +
                                          ": next-step termination is not Lipschitz continuous (B4): " + why);
    }
  }
  ScopedTimer timer(timings.certify);
  std::vector<cert::LinearStage> stages;
  for (const auto& loop : loops) stages.push_back({*loop.witness, true, region_of(loop.model)});
  return cert::compose_linear(stages, options.assert_range);
}

cert::Certificate certify_expansive(const std::vector<LoopAnalysis>& loops, const AnalysisOptions& options,
                                    StageTimings& timings) {
  if (loops.size() != 1)
    throw PrerequisiteFailure("single loop", "expansive certificates cover single loops only, the program has " +
                                                 std::to_string(loops.size()));
  if (!options.center)
    throw PrerequisiteFailure("center", "the expansive path needs a center state (--center)");
  if (!loops.front().witness->d)
    throw PrerequisiteFailure("d", loop_label(loops.front().model) + ": no bounded-update constant");
  ScopedTimer timer(timings.certify);
  return cert::expansive_certificate(*loops.front().witness, loops.front().model, *options.center);
}

using Path = cert::Certificate (*)(const std::vector<LoopAnalysis>&, const AnalysisOptions&, StageTimings&);

void run_path(AnalysisReport& report, const std::vector<model::LoopModel>& models, rsm::SynthesisMode mode,
              Path path, const AnalysisOptions& options) {
  report.loops.clear();
  report.loops = analyze_loops(models, mode, options, report.timings);
  report.certificate = path(report.loops, options, report.timings);
}

void record_failure(AnalysisReport& report, const std::string& prerequisite, const std::string& message) {
  report.failed_prerequisite = prerequisite;
  report.failure = message;
  report.certificate.reset();
}

// Runs `body`, turning prerequisite and certificate errors into a recorded
// failure. Returns false on failure.
template <class Body>
bool attempt(AnalysisReport& report, Body&& body) {
  try {
    body();
    report.failure.clear();
    report.failed_prerequisite.clear();
    return true;
  } catch (const PrerequisiteFailure& e) {
    record_failure(report, e.prerequisite(), e.what());
  } catch (const cert::MissingSideCondition& e) {
    record_failure(report, e.name(), e.what());
  } catch (const cert::NotNonExpansive& e) {
    record_failure(report, kNonExpansive, e.what());
  } catch (const cert::NoBoundedUpdate& e) {
    record_failure(report, "d", e.what());
  } catch (const cert::ExpansionTooFast& e) {
    record_failure(report, "L < exp(3 eps^2 / 8 c^2)", e.what());
  } catch (const cert::CenterInfeasible& e) {
    record_failure(report, "center", e.what());
  } catch (const cert::MissingAssertion& e) {
    record_failure(report, "range assertion", e.what());
  } catch (const cert::CertificateError& e) {
    record_failure(report, "certificate", e.what());
  } catch (const lp::LpError& e) {
    record_failure(report, "LP", e.what());
  }
  return false;
}

nlohmann::json optional_rational(const std::optional<Rational>& value) {
  if (!value) return nullptr;
  return nlohmann::json{{"exact", psense::to_string(*value)}, {"decimal", to_decimal(*value)}};
}

}  // namespace

RequestedKind requested_kind_from_string(const std::string& text) {
  if (text == "affine") return RequestedKind::Affine;
  if (text == "linear") return RequestedKind::Linear;
  if (text == "expansive") return RequestedKind::Expansive;
  if (text == "auto") return RequestedKind::Auto;
  throw std::invalid_argument("unknown certificate kind '" + text + "' (expected affine, linear, expansive or auto)");
}

std::string program_hash(const dsl::Program& program) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dsl::pretty_print(program)) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

dsl::Program load_program(std::string_view text, const std::string& source_name,
                          std::vector<dsl::Diagnostic>* warnings) {
  dsl::Program program;
  try {
    program = dsl::parse(text, source_name);
  } catch (const dsl::SyntaxError& e) {
    throw InvalidProgram(e.what(), {e.what()});
  }
  auto diagnostics = dsl::validate(program);
  std::vector<std::string> errors;
  for (const auto& d : diagnostics) {
    if (d.severity == dsl::Severity::Error) errors.push_back(dsl::render(d, source_name));
    else if (warnings) warnings->push_back(d);
  }
  if (!errors.empty()) throw InvalidProgram(source_name + ": " + std::to_string(errors.size()) + " error(s)", errors);
  return program;
}

AnalysisReport certify_program(const dsl::Program& program, const std::string& program_id,
                               const AnalysisOptions& options) {
  AnalysisReport report;
  report.program_id = program_id;
  report.program_hash = program_hash(program);
  report.variables = model::collect_program_variables(program);

  std::vector<model::LoopModel> models;
  {
    ScopedTimer timer(report.timings.extract);
    try {
      models = model::extract_models(program);
    } catch (const model::ExtractionError& e) {
      record_failure(report, "extraction", e.what());
      return report;
    }
  }
  if (models.empty()) {
    record_failure(report, "loop", "the program has no while loop");
    return report;
  }

  const auto plain = rsm::SynthesisMode::Plain;
  const auto bounded = rsm::SynthesisMode::DifferenceBounded;
  switch (options.kind) {
    case RequestedKind::Affine:
      attempt(report, [&] { run_path(report, models, plain, certify_affine, options); });
      break;
    case RequestedKind::Linear:
      attempt(report, [&] { run_path(report, models, bounded, certify_linear, options); });
      break;
    case RequestedKind::Expansive:
      attempt(report, [&] { run_path(report, models, bounded, certify_expansive, options); });
      break;
    case RequestedKind::Auto: {
      if (attempt(report, [&] { run_path(report, models, bounded, certify_linear, options); })) break;
      report.warnings.push_back("linear certificate unavailable (" + report.failed_prerequisite +
                                "): " + report.failure);
      if (report.failed_prerequisite == kNonExpansive) {
        attempt(report, [&] { run_path(report, models, bounded, certify_expansive, options); });
        break;
      }
      attempt(report, [&] { run_path(report, models, plain, certify_affine, options); });
      break;
    }
  }
  if (report.certificate) report.certificate->program_hash = report.program_hash;
  return report;
}

AnalysisReport certify_source(std::string_view text, const std::string& source_name, const std::string& program_id,
                              const AnalysisOptions& options) {
  double parse_time = 0;
  std::vector<dsl::Diagnostic> warnings;
  dsl::Program program;
  {
    ScopedTimer timer(parse_time);
    program = load_program(text, source_name, &warnings);
  }
  AnalysisReport report = certify_program(program, program_id, options);
  report.timings.parse = parse_time;
  for (const auto& w : warnings) report.warnings.push_back(dsl::render(w, source_name));
  return report;
}

nlohmann::json to_json(const AnalysisReport& report) {
  nlohmann::json loops = nlohmann::json::array();
  for (const auto& loop : report.loops) {
    nlohmann::json entry;
    entry["loop"] = loop.model.loop_index + 1;
    entry["guard"] = loop.model.guard_text;
    entry["resolutions"] = loop.model.resolutions.size();
    entry["witness"] = loop.witness ? rsm::to_json(*loop.witness) : nlohmann::json(nullptr);
    entry["verification"] = loop.verification ? rsm::to_json(*loop.verification) : nlohmann::json(nullptr);
    nlohmann::json side;
    if (loop.witness) {
      side["d"] = optional_rational(loop.witness->d);
      side["M"] = optional_rational(loop.witness->M);
      side["L"] = optional_rational(loop.witness->L);
      side["c"] = optional_rational(loop.witness->c);
      side["L_prime"] = optional_rational(loop.witness->Lprime);
    }
    entry["side_conditions"] = side;
    if (loop.next_step)
      entry["next_step_lipschitz"] = {{"holds", loop.next_step->holds}, {"reasons", loop.next_step->reasons}};
    entry["notes"] = loop.notes;
    loops.push_back(std::move(entry));
  }
  nlohmann::json json;
  json["program"] = report.program_id;
  json["program_hash"] = report.program_hash;
  json["variables"] = report.variables;
  json["loops"] = std::move(loops);
  json["certificate"] = report.certificate ? cert::to_json(*report.certificate) : nlohmann::json(nullptr);
  json["failure"] = report.failure.empty() ? nlohmann::json(nullptr) : nlohmann::json(report.failure);
  json["failed_prerequisite"] =
      report.failed_prerequisite.empty() ? nlohmann::json(nullptr) : nlohmann::json(report.failed_prerequisite);
  json["warnings"] = report.warnings;
  json["timings"] = {{"parse", report.timings.parse},   {"extract", report.timings.extract},
                     {"lp", report.timings.lp},         {"verify", report.timings.verify},
                     {"certify", report.timings.certify}, {"total", report.timings.total()}};
  return json;
}

RationalVector parse_valuation(const std::string& text, const std::vector<std::string>& variables,
                               const RationalVector& base) {
  RationalVector out = base.empty() ? RationalVector(variables.size(), Rational(0)) : base;
  if (out.size() != variables.size()) throw std::invalid_argument("valuation base has the wrong dimension");
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    std::string item = text.substr(start, end - start);
    start = end + 1;
    auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    item = item.substr(first, item.find_last_not_of(" \t") - first + 1);
    auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected name=value in '" + item + "'");
    std::string name = item.substr(0, eq);
    name.erase(name.find_last_not_of(" \t") + 1);
    auto it = std::find(variables.begin(), variables.end(), name);
    if (it == variables.end()) throw std::invalid_argument("unknown variable '" + name + "'");
    try {
      std::string value = item.substr(eq + 1);
      value.erase(0, value.find_first_not_of(" \t"));
      out[static_cast<std::size_t>(it - variables.begin())] = parse_rational(value);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad number in '" + item + "'");
    }
  }
  return out;
}

}  // namespace psense::report
