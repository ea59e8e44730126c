#include "support.hpp"

#include "psense/dsl/parser.hpp"
#include "psense/report/analysis.hpp"
#include "psense/report/table.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace psense;
using namespace psense::report;

namespace {

AnalysisOptions with_kind(RequestedKind kind) {
  AnalysisOptions o;
  o.kind = kind;
  return o;
}

AnalysisReport certify_file(const std::string& file, const AnalysisOptions& options) {
  return certify_source(testsupport::read_text(testsupport::corpus_path(file)), file, file, options);
}

// Fresh scratch directory under the system temp dir, removed on scope exit.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() / ("psense-" + name + "-" + std::to_string(::getpid()))) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace

TEST_CASE("program hash is stable under reformatting and sensitive to edits") {
  auto a = dsl::parse("while x <= 1000 do x := x + 1 od");
  auto b = dsl::parse("while   x<=1000\n do\n   x := x + 1\n od");
  auto c = dsl::parse("while x <= 1001 do x := x + 1 od");
  CHECK(program_hash(a) == program_hash(b));
  CHECK(program_hash(a) != program_hash(c));
  CHECK(program_hash(a).size() == 16);
}

TEST_CASE("load_program rejects invalid programs") {
  CHECK_THROWS_AS(load_program("while x <= 1 do", "bad"), InvalidProgram);
  try {
    load_program("while x <= 10 do x := x * x od", "bad");
    FAIL("expected InvalidProgram");
  } catch (const InvalidProgram& e) {
    REQUIRE(e.diagnostics().size() == 1);
    CHECK(e.diagnostics()[0].find("non-affine-update") != std::string::npos);
  }
  std::vector<dsl::Diagnostic> warnings;
  load_program("x := 1; while x <= 10 do x := x + 1 od", "w", &warnings);
  CHECK(warnings.size() == 1);
}

TEST_CASE("mini-roulette certifies as affine") {
  auto report = certify_file("mini-roulette.pprog", with_kind(RequestedKind::Affine));
  REQUIRE(report.certified());
  CHECK(report.certificate->kind == cert::CertificateKind::Affine);
  CHECK(report.certificate->program_hash == report.program_hash);
  REQUIRE(report.loops.size() == 1);
  const auto& w = *report.loops[0].witness;
  CHECK(w.eta.coeffs == RationalVector{13, 0});
  CHECK(w.eta.offset == -13);
  CHECK(report.loops[0].verification->passed());
}

TEST_CASE("mini-roulette variant certifies as linear with threshold 1/M") {
  auto report = certify_file("mini-roulette-variant.pprog", with_kind(RequestedKind::Linear));
  REQUIRE(report.certified());
  const auto& c = *report.certificate;
  CHECK(c.kind == cert::CertificateKind::Linear);
  REQUIRE(c.theta);
  CHECK(*c.theta == 1 / *report.loops[0].witness->M);
  CHECK(c.B == 0);
}

TEST_CASE("rdwalk cannot be certified as linear") {
  auto report = certify_file("rdwalk.pprog", with_kind(RequestedKind::Linear));
  CHECK(!report.certified());
  CHECK(report.failed_prerequisite == "B4");
  CHECK(report.failure.find("B4") != std::string::npos);

  auto fallback = certify_file("rdwalk.pprog", with_kind(RequestedKind::Auto));
  REQUIRE(fallback.certified());
  CHECK(fallback.certificate->kind == cert::CertificateKind::Affine);
  CHECK(fallback.certificate->A == 12);
  CHECK(fallback.certificate->B == 10);
  CHECK(!fallback.warnings.empty());
}

TEST_CASE("identity loop and missing center fail with named prerequisites") {
  auto identity = certify_file("misc/identity-loop.pprog", with_kind(RequestedKind::Affine));
  CHECK(!identity.certified());
  CHECK(identity.failed_prerequisite == "RSM-map");

  auto expansive = certify_file("misc/expansive-drift.pprog", with_kind(RequestedKind::Expansive));
  CHECK(!expansive.certified());
  CHECK(expansive.failed_prerequisite == "center");

  auto with_center = with_kind(RequestedKind::Auto);
  with_center.center = RationalVector{50};
  auto ok = certify_file("misc/expansive-drift.pprog", with_center);
  REQUIRE(ok.certified());
  CHECK(ok.certificate->kind == cert::CertificateKind::Expansive);
}

TEST_CASE("sequential loops need the range assertion") {
  auto plain = certify_file("misc/two-walks.pprog", with_kind(RequestedKind::Affine));
  CHECK(!plain.certified());
  CHECK(plain.failed_prerequisite == "range assertion");
  auto asserted = with_kind(RequestedKind::Affine);
  asserted.assert_range = true;
  auto ok = certify_file("misc/two-walks.pprog", asserted);
  REQUIRE(ok.certified());
  CHECK(ok.loops.size() == 2);
}

TEST_CASE("report JSON shape") {
  auto report = certify_file("rdwalk.pprog", with_kind(RequestedKind::Affine));
  auto json = to_json(report);
  for (const char* key : {"program", "program_hash", "variables", "loops", "certificate", "failure", "timings"})
    CHECK(json.contains(key));
  CHECK(json["loops"][0]["side_conditions"]["M"]["exact"] == "5");
  CHECK(json["timings"]["total"].get<double>() >= 0);
}

TEST_CASE("parse_valuation") {
  std::vector<std::string> vars{"x", "w"};
  CHECK(parse_valuation("x=500, w=3", vars) == RationalVector{500, 3});
  CHECK(parse_valuation("w = 1/2", vars) == RationalVector{0, Rational(1, 2)});
  CHECK(parse_valuation("x=2.5", vars, {Rational(1), Rational(7)}) == RationalVector{Rational(5, 2), 7});
  CHECK(parse_valuation("", vars) == RationalVector{0, 0});
  CHECK_THROWS_AS(parse_valuation("y=1", vars), std::invalid_argument);
  CHECK_THROWS_AS(parse_valuation("x=abc", vars), std::invalid_argument);
  CHECK_THROWS_AS(parse_valuation("x", vars), std::invalid_argument);
}

TEST_CASE("directory report over the corpus") {
  auto dir = report_directory(PSENSE_CORPUS_DIR, AnalysisOptions{});
  CHECK(dir.errors.empty());
  REQUIRE(dir.reports.size() == 20);
  std::vector<std::string> affine, linear;
  for (const auto& r : dir.reports) {
    INFO(r.program_id);
    REQUIRE(r.certified());
    if (r.certificate->kind == cert::CertificateKind::Linear) linear.push_back(r.program_id);
    if (r.certificate->kind == cert::CertificateKind::Affine) affine.push_back(r.program_id);
  }
  CHECK(affine.size() == 8);
  CHECK(linear.size() == 12);
  for (const auto& name : testsupport::affine_programs())
    CHECK(std::find(affine.begin(), affine.end(), name) != affine.end());

  std::vector<TableRow> rows;
  for (const auto& r : dir.reports) rows.push_back(table_row(r));
  auto md = render_markdown(rows);
  CHECK(md.find("| example |") == 0);
  CHECK(std::count(md.begin(), md.end(), '\n') == 22);
  CHECK(to_json(rows).size() == 20);
}

TEST_CASE("directory report edge cases") {
  ScratchDir empty("empty");
  CHECK(report_directory(empty.path(), AnalysisOptions{}).reports.empty());

  ScratchDir single("single");
  std::filesystem::copy_file(testsupport::corpus_path("rdwalk.pprog"), single.path() / "rdwalk.pprog");
  std::ofstream(single.path() / "notes.txt") << "ignored";
  std::ofstream(single.path() / "broken.pprog") << "while x <= do";
  auto out = report_directory(single.path(), AnalysisOptions{});
  REQUIRE(out.reports.size() == 1);
  CHECK(out.reports[0].program_id == "rdwalk");
  CHECK(out.errors.size() == 1);

  auto row = table_row(certify_file("rdwalk.pprog", with_kind(RequestedKind::Linear)));
  CHECK(row.kind == "failed (B4)");
}
