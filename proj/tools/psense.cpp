#include "psense/dsl/parser.hpp"
#include "psense/dsl/validate.hpp"
#include "psense/report/analysis.hpp"
#include "psense/report/table.hpp"
#include "psense/sim/simulator.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace psense;

enum ExitCode { kOk = 0, kInputError = 1, kViolation = 2, kInconclusive = 3 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string stem_of(const std::string& path) {
  auto slash = path.find_last_of('/');
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = name.rfind('.');
  return dot == std::string::npos ? name : name.substr(0, dot);
}

void print_invalid(const report::InvalidProgram& e) {
  for (const auto& d : e.diagnostics()) std::cerr << d << "\n";
  if (e.diagnostics().empty()) std::cerr << e.what() << "\n";
}

int cmd_check(const std::string& file) {
  std::string text = read_file(file);
  dsl::Program program;
  try {
    program = dsl::parse(text, file);
  } catch (const dsl::SyntaxError& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  }
  auto diagnostics = dsl::validate(program);
  for (const auto& d : diagnostics) std::cerr << dsl::render(d, file) << "\n";
  if (dsl::has_errors(diagnostics)) return kInputError;
  std::cout << file << ": ok\n";
  return kOk;
}

struct CertifyArgs {
  std::string file;
  std::string kind = "auto";
  std::string center;
  std::string metric = "max";
  bool assert_range = false;
  bool dump_model = false;
  std::string lp_dump;
  std::string out;
};

report::AnalysisOptions analysis_options(const std::string& kind, const std::string& metric, bool assert_range,
                                         const std::string& lp_dump) {
  report::AnalysisOptions options;
  options.kind = report::requested_kind_from_string(kind);
  options.metric = metric == "euclid" ? rsm::MetricKind::Euclid : rsm::MetricKind::Max;
  options.assert_range = assert_range;
  if (!lp_dump.empty()) options.lp.dump_directory = lp_dump;
  return options;
}

int cmd_certify(const CertifyArgs& args) {
  std::string text = read_file(args.file);
  report::AnalysisOptions options = analysis_options(args.kind, args.metric, args.assert_range, args.lp_dump);
  dsl::Program program;
  try {
    program = report::load_program(text, args.file);
  } catch (const report::InvalidProgram& e) {
    print_invalid(e);
    return kInputError;
  }
  if (!args.center.empty()) {
    try {
      options.center = report::parse_valuation(args.center, model::collect_program_variables(program));
    } catch (const std::invalid_argument& e) {
      std::cerr << "--center: " << e.what() << "\n";
      return kInputError;
    }
  }
  report::AnalysisReport result = report::certify_source(text, args.file, stem_of(args.file), options);
  nlohmann::json json = report::to_json(result);
  if (args.dump_model) {
    nlohmann::json models = nlohmann::json::array();
    for (const auto& loop : result.loops) models.push_back(model::to_json(loop.model));
    if (result.loops.empty())
      for (const auto& m : model::extract_models(program)) models.push_back(model::to_json(m));
    json["models"] = std::move(models);
  }
  write_output(args.out, json.dump(2) + "\n");
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  if (!result.certified()) {
    std::cerr << "no certificate: " << result.failure << " [prerequisite: " << result.failed_prerequisite << "]\n";
    return kInconclusive;
  }
  return kOk;
}

struct SimulateArgs {
  std::string file;
  std::string against;
  std::vector<std::string> pairs;
  std::string from;
  std::string var;
  std::uint64_t samples = 10000;
  std::uint64_t cap = 10000000;
  std::uint64_t seed = 1;
  std::string out;
};

cert::Certificate load_certificate(const std::string& path) {
  nlohmann::json json = nlohmann::json::parse(read_file(path));
  // Accept a bare certificate or a full analysis report.
  if (json.contains("certificate") && json.contains("program_hash") && json.contains("loops")) {
    if (json["certificate"].is_null()) throw std::runtime_error(path + " holds a report without a certificate");
    json = json["certificate"];
  }
  return cert::certificate_from_json(json);
}

// Pairs for an expansive certificate: the center against points at
// distances rho/10, rho/2 and rho along the first coordinate.
std::vector<std::pair<RationalVector, RationalVector>> expansive_pairs(const cert::Certificate& c) {
  std::vector<std::pair<RationalVector, RationalVector>> pairs;
  for (Rational fraction : {Rational(1, 10), Rational(1, 2), Rational(1)}) {
    RationalVector moved = *c.center;
    moved[0] += fraction * *c.rho;
    pairs.emplace_back(*c.center, moved);
  }
  return pairs;
}

int cmd_simulate(const SimulateArgs& args) {
  std::string text = read_file(args.file);
  dsl::Program program;
  try {
    program = report::load_program(text, args.file);
  } catch (const report::InvalidProgram& e) {
    print_invalid(e);
    return kInputError;
  }
  auto models = model::extract_models(program);
  if (models.empty()) {
    std::cerr << args.file << ": no while loop to simulate\n";
    return kInputError;
  }
  const auto& variables = models.front().program_variables;
  std::string var = args.var.empty() ? variables.front() : args.var;
  auto var_it = std::find(variables.begin(), variables.end(), var);
  if (var_it == variables.end()) {
    std::cerr << "--var: unknown variable '" << var << "'\n";
    return kInputError;
  }
  sim::SimulationOptions options{args.samples, args.cap, args.seed};

  if (args.against.empty()) {
    if (args.from.empty()) {
      std::cerr << "simulate needs --against CERT or --from VALUATION\n";
      return kInputError;
    }
    RationalVector start = report::parse_valuation(args.from, variables);
    sim::State v0;
    for (const auto& x : start) v0.push_back(to_double(x));
    sim::CompiledProgram compiled(models);
    auto value = sim::estimate_expectation(compiled, v0, static_cast<std::size_t>(var_it - variables.begin()), options);
    auto steps = sim::estimate_termination_time(compiled, v0, options);
    nlohmann::json json{{"variable", var}, {"expectation", sim::to_json(value)}, {"steps", sim::to_json(steps)}};
    write_output(args.out, json.dump(2) + "\n");
    return value.is_censored() || steps.is_censored() ? kInconclusive : kOk;
  }

  cert::Certificate certificate = load_certificate(args.against);
  std::string hash = report::program_hash(program);
  if (certificate.program_hash != hash) {
    std::cerr << args.against << ": certificate is for program " << certificate.program_hash << ", " << args.file
              << " hashes to " << hash << "\n";
    return kInputError;
  }
  std::vector<std::pair<RationalVector, RationalVector>> pairs;
  for (const auto& spec : args.pairs) {
    auto colon = spec.find(':');
    if (colon == std::string::npos) {
      std::cerr << "--pair: expected 'x=..:x=..', got '" << spec << "'\n";
      return kInputError;
    }
    RationalVector left = report::parse_valuation(spec.substr(0, colon), variables);
    RationalVector right = report::parse_valuation(spec.substr(colon + 1), variables, left);
    pairs.emplace_back(std::move(left), std::move(right));
  }
  if (pairs.empty() && certificate.kind == cert::CertificateKind::Expansive) pairs = expansive_pairs(certificate);
  if (pairs.empty()) {
    std::cerr << "simulate --against needs at least one --pair\n";
    return kInputError;
  }

  try {
    sim::BoundCheckReport result = sim::empirical_bound_check(certificate, models, pairs, var, options);
    write_output(args.out, sim::to_json(result).dump(2) + "\n");
    if (!result.passed()) {
      std::cerr << "bound violated\n";
      return kViolation;
    }
    return kOk;
  } catch (const sim::CensoredRuns& e) {
    write_output(args.out, sim::to_json(e.report()).dump(2) + "\n");
    std::cerr << e.what() << "\n";
    return kInconclusive;
  } catch (const sim::PairOutsideRegion& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  }
}

struct ReportArgs {
  std::string directory;
  std::string kind = "auto";
  std::string metric = "max";
  std::string markdown_out;
  std::string json_out;
};

int cmd_report(const ReportArgs& args) {
  report::AnalysisOptions options = analysis_options(args.kind, args.metric, false, "");
  report::DirectoryReport result = report::report_directory(args.directory, options);
  std::vector<report::TableRow> rows;
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& r : result.reports) {
    rows.push_back(report::table_row(r));
    reports.push_back(report::to_json(r));
  }
  write_output(args.markdown_out, report::render_markdown(rows));
  if (!args.json_out.empty()) {
    nlohmann::json json{{"rows", report::to_json(rows)}, {"reports", reports}, {"errors", result.errors}};
    write_output(args.json_out, json.dump(2) + "\n");
  }
  for (const auto& e : result.errors) std::cerr << e << "\n";
  return result.errors.empty() ? kOk : kInputError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expected-sensitivity analysis for affine probabilistic loops"};
  app.require_subcommand(1);

  std::string check_file;
  auto* check = app.add_subcommand("check", "Parse and validate a program");
  check->add_option("file", check_file, "Program file")->required();

  CertifyArgs certify_args;
  auto* certify = app.add_subcommand("certify", "Synthesize an RSM-map and derive a sensitivity certificate");
  certify->add_option("file", certify_args.file, "Program file")->required();
  certify->add_option("--kind", certify_args.kind, "affine, linear, expansive or auto")
      ->check(CLI::IsMember({"affine", "linear", "expansive", "auto"}));
  certify->add_option("--center", certify_args.center, "Center state for expansive loops, e.g. 'x=50'");
  certify->add_option("--metric", certify_args.metric, "max or euclid")->check(CLI::IsMember({"max", "euclid"}));
  certify->add_flag("--assert-range", certify_args.assert_range,
                    "Assume each loop's outputs lie in the region of the rest of the program");
  certify->add_flag("--dump-model", certify_args.dump_model, "Include the extracted loop models");
  certify->add_option("--lp-dump", certify_args.lp_dump, "Write every solved LP to this directory");
  certify->add_option("--out", certify_args.out, "Report file (default stdout)");

  SimulateArgs simulate_args;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates and empirical bound checks");
  simulate->add_option("file", simulate_args.file, "Program file")->required();
  simulate->add_option("--against", simulate_args.against, "Certificate or certify report JSON");
  simulate->add_option("--pair,--pairs", simulate_args.pairs, "Start pair 'x=500:x=500.1' (repeatable)");
  simulate->add_option("--from", simulate_args.from, "Start state for plain estimates, e.g. 'x=900'");
  simulate->add_option("--var", simulate_args.var, "Observed variable (default: first variable)");
  simulate->add_option("--samples", simulate_args.samples, "Trials per estimate")->check(CLI::Range(2, 1 << 30));
  simulate->add_option("--cap", simulate_args.cap, "Iteration cap per loop");
  simulate->add_option("--seed", simulate_args.seed, "Base seed");
  simulate->add_option("--out", simulate_args.out, "Report file (default stdout)");

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "Certify every .pprog file in a directory and tabulate");
  report_cmd->add_option("dir", report_args.directory, "Directory")->required()->check(CLI::ExistingDirectory);
  report_cmd->add_option("--kind", report_args.kind, "affine, linear, expansive or auto")
      ->check(CLI::IsMember({"affine", "linear", "expansive", "auto"}));
  report_cmd->add_option("--metric", report_args.metric, "max or euclid")->check(CLI::IsMember({"max", "euclid"}));
  report_cmd->add_option("--markdown", report_args.markdown_out, "Markdown table file (default stdout)");
  report_cmd->add_option("--json", report_args.json_out, "JSON table and reports file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*check) return cmd_check(check_file);
    if (*certify) return cmd_certify(certify_args);
    if (*simulate) return cmd_simulate(simulate_args);
    if (*report_cmd) return cmd_report(report_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
